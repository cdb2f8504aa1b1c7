import numpy as np
import pytest

from polyheat.basis import graded_monomials
from polyheat.domains import DomainSpec, total_mass
from polyheat.errors import CapacityError
from polyheat.quadrature import build_quadrature, gauss_jacobi_01, jacobi_recurrence

from _oracles import (
    ball_monomial_moment,
    interval_monomial_moment,
    simplex_monomial_moment,
)

CASES = [
    (DomainSpec.interval(-0.5, -0.5), 16),
    (DomainSpec.interval(0.7, -0.3), 14),
    (DomainSpec.ball(1, 0.8), 14),
    (DomainSpec.ball(2, 0.25), 12),
    (DomainSpec.ball(3, -0.2), 10),
    (DomainSpec.simplex(1, (0.5, 0.5)), 14),
    (DomainSpec.simplex(2, (-0.3, 0.8, 1.7)), 12),
    (DomainSpec.simplex(3, (0.5, 0.2, 1.0, -0.1)), 8),
]


def reference_moment(spec, exponents):
    if spec.kind == "interval":
        return interval_monomial_moment(exponents[0], spec.alpha, spec.beta)
    if spec.kind == "ball":
        return ball_monomial_moment(exponents, spec.gamma)
    return simplex_monomial_moment(exponents, spec.kappa)


@pytest.mark.parametrize("spec,deg", CASES, ids=lambda v: str(v))
def test_weights_sum_to_mass(spec, deg):
    rule = build_quadrature(spec, deg)
    assert np.all(rule.weights > 0)
    assert rule.total() == pytest.approx(total_mass(spec), rel=1e-12)


@pytest.mark.parametrize("spec,deg", CASES, ids=lambda v: str(v))
def test_all_monomial_moments(spec, deg):
    rule = build_quadrature(spec, deg)
    scale = total_mass(spec)
    for e in graded_monomials(spec.n, deg):
        vals = np.prod(rule.nodes ** np.asarray(e)[None, :], axis=1)
        got = float(rule.weights @ vals)
        ref = reference_moment(spec, e)
        assert got == pytest.approx(ref, rel=1e-11, abs=1e-11 * scale), e


def test_capacity_error():
    with pytest.raises(CapacityError):
        build_quadrature(DomainSpec.ball(4, 0.5), 6)
    with pytest.raises(CapacityError):
        build_quadrature(DomainSpec.simplex(4, (0.5,) * 5), 200)


def test_gauss_jacobi_01_beta_moments():
    # weight u^b (1-u)^a on (0, 1): moments are Beta ratios
    from math import lgamma, exp

    a, b = 0.7, -0.3
    u, w = gauss_jacobi_01(8, a, b)
    for k in range(6):
        got = float(w @ u ** k)
        ref = exp(lgamma(b + 1 + k) + lgamma(a + 1) - lgamma(a + b + 2 + k))
        assert got == pytest.approx(ref, rel=1e-13)


def test_recurrence_chebyshev():
    a, sqb, mass = jacobi_recurrence(6, -0.5, -0.5)
    assert mass == pytest.approx(np.pi)
    assert a == pytest.approx(np.zeros(7), abs=1e-15)
    # b_1 = 1/2, b_k = 1/4 beyond
    assert sqb[1] ** 2 == pytest.approx(0.5)
    assert sqb[2] ** 2 == pytest.approx(0.25)
    assert sqb[5] ** 2 == pytest.approx(0.25)
