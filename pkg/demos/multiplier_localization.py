"""Spectral multipliers: localization and the finite-speed surrogate.

A C^m compactly supported profile of delta * sqrt(-L) produces a kernel
that decays like (1 + rho/delta)^(-m) against the volume normalization; a
profile with band-limited Fourier transform produces a kernel that is
numerically zero beyond a radius proportional to delta times the band.
"""

from polyheat import (
    DomainSpec,
    HeatKernelEvaluator,
    VolumeSource,
    build_basis,
    finite_speed_scan,
    localization_check,
)

spec = DomainSpec.interval(-0.5, -0.5)
ev = HeatKernelEvaluator(build_basis(spec, 200))
vol = VolumeSource(spec)

print("localization of the order-3 bump multiplier:")
for delta in (0.05, 0.1):
    rep = localization_check(ev, delta, 3, vol)
    print(f"  delta={delta}: fitted exponent {rep.exponent:.2f} (needs >= 2.5), "
          f"r^2 {rep.r2:.4f}, empirical c_m {rep.c_m_hat:.2f}")

print()
print("finite-speed surrogate with the sinc^16 band-limited multiplier:")
for delta in (0.05, 0.1):
    rep = finite_speed_scan(ev, delta, 8, 2.0)
    print(f"  delta={delta}: support radius r* = {rep.r_star:.3f}, "
          f"c*_hat = {rep.c_star_hat:.3f}, max |kernel| beyond r* = {rep.max_beyond:.1e}")
print("(c*_hat stable across delta certifies the linear-in-delta support law)")
