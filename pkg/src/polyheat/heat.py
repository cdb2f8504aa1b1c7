"""Spectral heat kernels and multiplier kernels with certified truncation.

The kernel at time t is the level sum  sum_k exp(-lambda_k t) * K_k(x, y)
where K_k is the reproducing kernel of level k.  Truncation is controlled
through the Cauchy-Schwarz bound |K_k(x, y)| <= sqrt(C_k(x) C_k(y)) with
C_k the level diagonal, plus an extrapolated bound for the part beyond the
built basis.  Evaluations either return an honest (value, tail_bound) pair
or refuse when the requested time is under-resolved for the basis cap.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log, sqrt

import numpy as np

from .basis import OrthonormalBasis, eigen_table
from .domains import INTERVAL
from .errors import CapacityError, ParameterError, PrecisionError

DEFAULT_EPSILON = 1e-10
# Extrapolation beyond the cap trusts a measured geometric decay ratio only
# below this threshold; otherwise the evaluation refuses.
MAX_DECAY_RATIO = 0.9
_RATIO_WINDOW = 5


def default_t_min(spec, cap=None):
    """Smallest admissible time: kind floor raised so lambda_cap * t >= 30."""
    floor = 1e-3 if spec.kind == INTERVAL else 1e-2
    if cap is None:
        return floor
    from .basis import eigenvalue

    return max(floor, 30.0 / eigenvalue(spec, cap))


@dataclass(frozen=True)
class TruncationPolicy:
    """Absolute tail target, smallest admissible time, and the level cap."""

    epsilon: float
    t_min: float
    hard_cap: int

    def __post_init__(self):
        if self.epsilon <= 0 or self.t_min <= 0:
            raise ParameterError("epsilon and t_min must be positive")


@dataclass(frozen=True)
class MultiplierSpec:
    """Spectral multiplier profile Phi.

    family "heat_exp": Phi(u) = exp(-u^2); with delta = sqrt(t) this equals
    the heat kernel.  family "smooth_bump": the even truncated-power profile
    (1 - (u/R)^2)^(order+1) on |u| < R, zero outside; exactly C^order across
    the support edge, with Phi(0) = 1 and a clean power-law transform
    envelope (a C-infinity mollifier would decay too erratically over finite
    windows to certify order-m localization).  family "sinc_power":
    Phi(u) = (sin(A u / 2) / (A u / 2))^(2m), whose Fourier transform is
    supported in [-mA, mA].
    """

    family: str
    support: float = 1.0  # R, spectral support radius of smooth_bump
    order: int = 4        # m
    band: float = 2.0     # A, for sinc_power

    def __post_init__(self):
        if self.family not in ("heat_exp", "smooth_bump", "sinc_power"):
            raise ParameterError(f"unknown multiplier family {self.family!r}")
        if self.support <= 0 or self.band <= 0 or self.order < 1:
            raise ParameterError("multiplier parameters must be positive")

    def phi(self, u):
        u = np.asarray(u, dtype=float)
        if self.family == "heat_exp":
            return np.exp(-(u ** 2))
        if self.family == "smooth_bump":
            out = np.zeros_like(u)
            s = np.abs(u) / self.support
            inside = s < 1
            out[inside] = (1.0 - s[inside] ** 2) ** (self.order + 1)
            return out
        half = self.band * u / 2.0
        out = np.ones_like(u)
        nz = half != 0
        out[nz] = (np.sin(half[nz]) / half[nz]) ** (2 * self.order)
        return out

    @property
    def spectral_cutoff(self):
        return self.support if self.family == "smooth_bump" else None

    @property
    def fourier_band(self):
        return self.order * self.band if self.family == "sinc_power" else None


class HeatKernelEvaluator:
    """Heat and multiplier kernels over one orthonormal basis."""

    def __init__(self, basis: OrthonormalBasis, policy: TruncationPolicy | None = None):
        self.basis = basis
        if policy is None:
            policy = TruncationPolicy(DEFAULT_EPSILON,
                                      default_t_min(basis.spec, basis.max_degree),
                                      basis.max_degree)
        if policy.hard_cap > basis.max_degree:
            raise CapacityError("policy cap exceeds the built basis degree")
        self.policy = policy
        self.eigen = eigen_table(basis.spec, policy.hard_cap)
        self._node_christoffel = None

    @property
    def spec(self):
        return self.basis.spec

    @property
    def lambdas(self):
        return self.eigen.lambdas

    def node_christoffel(self):
        if self._node_christoffel is None:
            self._node_christoffel = self.basis.christoffel_from_values(
                self.basis.node_values
            )[:, : self.policy.hard_cap + 1]
        return self._node_christoffel

    # -- core spectral summation -----------------------------------------

    def _prepare(self, X, Y):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        Vx = self.basis.evaluate(X)
        Vy = self.basis.evaluate(Y) if Y is not X else Vx
        return Vx, Vy

    def _level_kernels(self, Vx, Vy):
        K = self.policy.hard_cap
        L = np.empty((K + 1, Vx.shape[0], Vy.shape[0]))
        for k in range(K + 1):
            sl = self.basis.level_slice(k)
            L[k] = Vx[:, sl] @ Vy[:, sl].T
        return L

    def _sum_with_tail(self, g, L, Cx, Cy, beyond):
        """Partial sums with per-pair truncation at the tail target.

        g: (K+1,) level weights; L: (K+1, p, q) level kernels;
        Cx/Cy: level diagonals; beyond: (p, q) bound for levels past the cap.
        Returns (value, tail_bound) arrays of shape (p, q).
        """
        eps = self.policy.epsilon
        U = np.abs(g)[:, None, None] * np.sqrt(Cx[:, :, None] * Cy.T[None, :, :]).transpose(1, 0, 2)
        # suffix[k] = sum of U_(k+1..cap) + beyond
        suffix = np.concatenate([np.cumsum(U[::-1], axis=0)[::-1][1:],
                                 np.zeros((1,) + U.shape[1:])], axis=0) + beyond
        terms = g[:, None, None] * L
        partial = np.cumsum(terms, axis=0)
        ok = suffix <= eps
        kstar = np.where(ok.any(axis=0), ok.argmax(axis=0), U.shape[0] - 1)
        ii, jj = np.meshgrid(np.arange(U.shape[1]), np.arange(U.shape[2]), indexing="ij")
        value = partial[kstar, ii, jj]
        tail = suffix[kstar, ii, jj]
        return value, tail

    def _window_sqrt_cc(self, Cx, Cy):
        """sqrt(C_k(x) C_k(y)) over the last levels: (w, p, q)."""
        K = self.policy.hard_cap
        w = min(_RATIO_WINDOW, K)
        sl = slice(K - w, K + 1)
        sq = np.sqrt(Cx[:, sl, None] * Cy[:, sl].T[None, :, :])  # (p, w+1, q)
        return sq.transpose(1, 0, 2), sl

    def _beyond_cap_heat(self, t, Cx, Cy):
        """Geometric bound on the post-cap tail; refuses if decay is too flat.

        Eigenvalue increments lambda_(k+1) - lambda_k increase with k, so the
        first post-cap increment gives a rigorous geometric ratio for the
        exponential factor; the level diagonals are majorized by twice their
        maximum over the last levels (slow polynomial growth against
        super-exponential damping).
        """
        K = self.policy.hard_cap
        from .basis import eigenvalue

        gap = eigenvalue(self.spec, K + 1) - self.lambdas[K]
        q = np.exp(-gap * t)
        if q > MAX_DECAY_RATIO:
            t_ok = self._achievable_t(Cx, Cy)
            raise PrecisionError(
                f"t={t:g} is under-resolved for the basis cap {K}: post-cap decay "
                f"ratio {q:.3f} > {MAX_DECAY_RATIO}; epsilon={self.policy.epsilon:g} "
                f"is achievable for t >= {t_ok:.4g}"
            )
        sq, _ = self._window_sqrt_cc(Cx, Cy)
        lam_next = self.lambdas[K] + gap
        return 2.0 * sq.max(axis=0) * np.exp(-lam_next * t) / (1.0 - q)

    def _achievable_t(self, Cx, Cy):
        K = self.policy.hard_cap
        cmax = float(np.sqrt(Cx[:, K].max() * Cy[:, K].max()))
        lam = self.lambdas[K]
        return (log(max(cmax, 1.0) * (K + 1)) - log(self.policy.epsilon)) / lam

    # -- heat kernel --------------------------------------------------------

    def heat_kernel_grid(self, t, X, Y):
        """Kernel values and tail bounds on a grid: (p, q) arrays."""
        if t < self.policy.t_min:
            raise PrecisionError(
                f"t={t:g} below t_min={self.policy.t_min:g}; the basis cap "
                f"{self.policy.hard_cap} cannot certify this regime"
            )
        Vx, Vy = self._prepare(X, Y)
        Cx = self.basis.christoffel_from_values(Vx)
        Cy = self.basis.christoffel_from_values(Vy)
        K = self.policy.hard_cap
        g = np.exp(-self.lambdas * t)
        L = self._level_kernels(Vx, Vy)
        beyond = self._beyond_cap_heat(t, Cx, Cy)
        return self._sum_with_tail(g, L, Cx[:, : K + 1], Cy[:, : K + 1], beyond)

    def heat_kernel(self, t, x, y):
        """Heat kernel value at one pair; returns (value, tail_bound)."""
        v, b = self.heat_kernel_grid(t, np.atleast_2d(np.asarray(x, float)),
                                     np.atleast_2d(np.asarray(y, float)))
        return float(v[0, 0]), float(b[0, 0])

    # -- semigroup-level checks ----------------------------------------------

    def mass_check(self, t, x, quad=None):
        """integral of e^(tL)(x, .) d(mu); contract: equals 1."""
        if quad is None:
            quad = self.basis.quad
            node_vals = self.basis.node_values
        else:
            node_vals = self.basis.evaluate(quad.nodes)
        Vx = self.basis.evaluate(np.atleast_2d(np.asarray(x, float)))
        row, _ = self._row_values(t, Vx, node_vals)
        return float(row @ quad.weights)

    def _row_values(self, t, Vx, Vy):
        if t < self.policy.t_min:
            raise PrecisionError(f"t={t:g} below t_min={self.policy.t_min:g}")
        Cx = self.basis.christoffel_from_values(Vx)
        Cy = self.basis.christoffel_from_values(Vy)
        g = np.exp(-self.lambdas * t)
        L = self._level_kernels(Vx, Vy)
        beyond = self._beyond_cap_heat(t, Cx, Cy)
        v, b = self._sum_with_tail(g, L, Cx, Cy, beyond)
        return v[0], b[0]

    def semigroup_check(self, s, t, x, z, quad=None):
        """|e^((s+t)L)(x,z) - integral e^(sL)(x,y) e^(tL)(y,z) dmu(y)|."""
        if quad is None:
            quad = self.basis.quad
            node_vals = self.basis.node_values
        else:
            node_vals = self.basis.evaluate(quad.nodes)
        Vx = self.basis.evaluate(np.atleast_2d(np.asarray(x, float)))
        Vz = self.basis.evaluate(np.atleast_2d(np.asarray(z, float)))
        row_s, _ = self._row_values(s, Vx, node_vals)
        row_t, _ = self._row_values(t, Vz, node_vals)
        lhs, _ = self._sum_with_tail(
            np.exp(-self.lambdas * (s + t)),
            self._level_kernels(Vx, Vz),
            self.basis.christoffel_from_values(Vx),
            self.basis.christoffel_from_values(Vz),
            self._beyond_cap_heat(s + t,
                                  self.basis.christoffel_from_values(Vx),
                                  self.basis.christoffel_from_values(Vz)),
        )
        composed = float((row_s * row_t) @ quad.weights)
        return abs(float(lhs[0, 0]) - composed)

    # -- spectral multipliers -------------------------------------------------

    def multiplier_grid(self, phi: MultiplierSpec, delta, X, Y):
        """Kernel of Phi(delta sqrt(-L)) on a grid; returns (values, tails)."""
        if delta <= 0:
            raise ParameterError("delta must be positive")
        K = self.policy.hard_cap
        u = delta * np.sqrt(self.lambdas)
        g = phi.phi(u)
        Vx, Vy = self._prepare(X, Y)
        Cx = self.basis.christoffel_from_values(Vx)
        Cy = self.basis.christoffel_from_values(Vy)
        L = self._level_kernels(Vx, Vy)

        if phi.spectral_cutoff is not None:
            if u[K] < phi.spectral_cutoff:
                raise CapacityError(
                    f"band of smooth_bump (support {phi.spectral_cutoff:g}) exceeds the "
                    f"built basis: delta*sqrt(lambda_cap)={u[K]:.3g}; raise delta or the cap"
                )
            value = np.tensordot(g, L, axes=(0, 0))
            tail = np.zeros_like(value)
            return value, tail

        if phi.family == "sinc_power":
            m = phi.order
            sq, _ = self._window_sqrt_cc(Cx, Cy)
            cbar = 2.0 * sq.max(axis=0)
            env = (2.0 / (phi.band * delta)) ** (2 * m)
            beyond = cbar * env * (K - 1.0) ** (1 - 2 * m) / (2 * m - 1)
            return self._sum_with_tail(g, L, Cx, Cy, beyond)

        # heat_exp: same machinery as the heat kernel at t = delta^2
        t = delta * delta
        beyond = self._beyond_cap_heat(t, Cx, Cy)
        return self._sum_with_tail(g, L, Cx, Cy, beyond)

    def multiplier_kernel(self, phi, delta, x, y):
        v, b = self.multiplier_grid(phi, delta,
                                    np.atleast_2d(np.asarray(x, float)),
                                    np.atleast_2d(np.asarray(y, float)))
        return float(v[0, 0]), float(b[0, 0])
