from math import pi, sqrt

import numpy as np
import pytest

from polyheat.domains import DomainSpec, total_mass
from polyheat.errors import DomainError, PrecisionError
from polyheat.volumes import (
    VolumeSource,
    ball_volume,
    sample_measure,
    volume_surrogate,
)

from _oracles import arc_volume_chebyshev


class TestSurrogate:
    def test_examples(self):
        assert volume_surrogate(DomainSpec.ball(2, 0.0), (0.0, 0.0), 0.3) == pytest.approx(0.09)
        assert volume_surrogate(DomainSpec.interval(-0.5, -0.5), (0.3,), 0.2) == pytest.approx(0.2)
        got = volume_surrogate(DomainSpec.simplex(1, (0.5, 0.5)), (0.0,), 0.3)
        assert got == pytest.approx(0.3 * sqrt(1.09) * sqrt(0.09), rel=1e-12)

    def test_range_error(self):
        with pytest.raises(DomainError):
            volume_surrogate(DomainSpec.ball(2, 0.0), (0.0, 0.0), 0.0)
        with pytest.raises(DomainError):
            volume_surrogate(DomainSpec.ball(2, 0.0), (0.0, 0.0), 4.0)


class TestIntervalExact:
    def test_arc_length(self):
        spec = DomainSpec.interval(-0.5, -0.5)
        for x in (1.0, 0.3, -0.7):
            for r in (0.1, 0.5, 1.5):
                est = ball_volume(spec, (x,), r)
                assert est.stderr == 0.0
                assert est.method == "exact1d"
                assert est.value == pytest.approx(arc_volume_chebyshev(x, r), rel=1e-12)

    def test_whole_domain(self):
        for spec in (DomainSpec.interval(0.3, -0.4), DomainSpec.ball(2, 0.5),
                     DomainSpec.simplex(2, (0.5, 0.5, 0.5))):
            est = ball_volume(spec, np.zeros(spec.n) if spec.kind != "simplex"
                              else np.full(spec.n, 0.2), pi)
            assert est.value == pytest.approx(total_mass(spec), rel=1e-12)

    def test_radius_error(self):
        with pytest.raises(DomainError):
            ball_volume(DomainSpec.interval(-0.5, -0.5), (0.0,), -0.1)


class TestMonteCarlo:
    def test_flat_limit_disc(self):
        # gamma = 1/2 is Lebesgue measure; near the center rho is Euclidean
        spec = DomainSpec.ball(2, 0.5)
        est = ball_volume(spec, (0.0, 0.0), 0.1, samples=400_000, seed=5)
        assert est.value == pytest.approx(pi * 0.01, rel=0.05)
        assert est.stderr < 0.05 * est.value

    def test_deterministic_given_seed(self):
        spec = DomainSpec.simplex(2, (0.5, 0.5, 0.5))
        x = np.array([0.3, 0.3])
        a = ball_volume(spec, x, 0.4, samples=50_000, seed=42)
        b = ball_volume(spec, x, 0.4, samples=50_000, seed=42)
        assert a.value == b.value and a.stderr == b.stderr
        c = ball_volume(spec, x, 0.4, samples=50_000, seed=43)
        assert c.value != a.value

    def test_stratified_agrees_with_plain(self):
        spec = DomainSpec.ball(2, 0.25)
        x = np.array([0.2, 0.1])
        a = ball_volume(spec, x, 0.5, samples=200_000, seed=1, strata=8)
        b = ball_volume(spec, x, 0.5, samples=200_000, seed=2, strata=1)
        assert a.value == pytest.approx(b.value, abs=4 * (a.stderr + b.stderr))

    def test_sampler_moments(self):
        # Dirichlet marginal mean of coordinate i is (kappa_i + 1/2)/(|kappa| + (n+1)/2)
        spec = DomainSpec.simplex(2, (0.5, 1.5, 0.5))
        rng = np.random.default_rng(7)
        pts = sample_measure(spec, 200_000, rng)
        denom = sum(spec.kappa) + 1.5
        assert pts[:, 0].mean() == pytest.approx(1.0 / denom, rel=0.02)
        assert pts[:, 1].mean() == pytest.approx(2.0 / denom, rel=0.02)

    def test_ball_sampler_radial_law(self):
        spec = DomainSpec.ball(2, 0.5)
        rng = np.random.default_rng(8)
        pts = sample_measure(spec, 200_000, rng)
        v = (pts ** 2).sum(axis=1)
        # r^2 ~ Beta(n/2, gamma + 1/2) = Beta(1, 1) = uniform
        assert v.mean() == pytest.approx(0.5, abs=0.01)


class TestVolumeSource:
    def test_cache_and_refusal(self):
        spec = DomainSpec.ball(2, 0.5)
        src = VolumeSource(spec, samples=50_000, seed=3)
        a = src((0.1, 0.1), 0.4)
        b = src((0.1, 0.1), 0.4)
        assert a is b
        strict = VolumeSource(spec, samples=2_000, seed=3, max_rel_stderr=0.001)
        with pytest.raises(PrecisionError):
            strict((0.1, 0.1), 0.05)
