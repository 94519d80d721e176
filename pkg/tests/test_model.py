import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from gainlearn.errors import DomainError, ParameterError
from gainlearn.model import (
    ModelParams,
    NoiseSource,
    filter_candidate,
    filter_dagger,
    filter_derivatives,
    simulate_path,
)
from gainlearn.weights import g_derivatives, g_weights, phi

P = ModelParams(theta0=2.0, beta0=0.25, delta0=1.0)


class TestParams:
    def test_derived(self):
        assert_allclose(P.alpha0, 4.0 / 3.0)
        assert_allclose(P.c0, 0.75)
        assert P.a_init == P.alpha0

    @pytest.mark.parametrize(
        "kw",
        [
            dict(theta0=0.9, beta0=0.0, delta0=1.0, theta_lo=0.5),
            dict(theta0=2.0, beta0=0.0, delta0=1.0, theta_lo=2.5),
            dict(theta0=2.0, beta0=0.8, delta0=1.0),  # theta0 (1 - beta0) = 0.4
            dict(theta0=2.0, beta0=1.0, delta0=1.0),
            dict(theta0=2.0, beta0=0.0, delta0=1.0, sigma_u=-1.0),
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            ModelParams(**kw)


class TestSimulate:
    def test_reproducible(self):
        a = simulate_path(P, 300, NoiseSource(11, 4))
        b = simulate_path(P, 300, NoiseSource(11, 4))
        for f in ("eps", "u", "a", "y", "z"):
            assert_array_equal(getattr(a, f), getattr(b, f))

    def test_streams_differ(self):
        a = simulate_path(P, 50, NoiseSource(11, 4))
        b = simulate_path(P, 50, NoiseSource(11, 5))
        assert not np.array_equal(a.eps, b.eps)

    def test_nested_prefix(self):
        a = simulate_path(P, 1000, NoiseSource(3, 2))
        b = simulate_path(P, 100, NoiseSource(3, 2))
        assert_array_equal(a.prefix(100).a, b.a)
        assert_array_equal(a.prefix(100).z, b.z)

    def test_recursions_hold(self):
        s = simulate_path(P, 500, NoiseSource(1, 0))
        assert s.a[0] == P.a_init
        assert_allclose(s.y, P.delta0 + P.beta0 * s.a[:-1] + s.eps, rtol=1e-14)
        assert_allclose(s.z, s.a[:-1] + s.u, rtol=1e-14)
        t = np.arange(1, 501)
        assert_allclose(s.a[1:], s.a[:-1] + P.theta0 / t * (s.y - s.a[:-1]), rtol=1e-14)

    def test_noiseless_fixed_point(self):
        p = ModelParams(2.0, 0.25, 1.0, sigma_eps=0.0, sigma_u=0.0)
        s = simulate_path(p, 1000)
        assert_allclose(s.a, p.alpha0, rtol=1e-15)
        assert_allclose(s.y, p.alpha0, rtol=1e-15)

    def test_forced_first_shock(self):
        p = ModelParams(2.0, 0.0, 1.0, a_init=0.0)
        s = simulate_path(p, 1, eps=np.array([0.5]), u=np.zeros(1))
        assert s.y[0] == 1.5
        assert s.a[1] == 3.0

    def test_weight_representation(self):
        p = ModelParams(2.3, 0.1, 0.5, a_init=-1.0)
        s = simulate_path(p, 2000, NoiseSource(9, 1))
        n = s.n
        rep = (p.a_init - p.alpha0) * phi(0, n, p.theta0, p.beta0) + g_weights(n, p.theta0, p.beta0) @ s.eps
        assert_allclose(s.a[-1] - p.alpha0, rep, rtol=1e-8)

    def test_custom_sampler(self):
        s = simulate_path(P, 200, NoiseSource(1, 0), eps_sampler=lambda rng, k: rng.standard_t(5, k))
        assert np.all(np.isfinite(s.y))

    def test_random_initial_state(self):
        p = ModelParams(2.0, 0.25, 1.0, a_init_sd=1.0)
        assert simulate_path(p, 5, NoiseSource(1, 0)).a[0] != p.a_init

    def test_zero_length(self):
        with pytest.raises(DomainError):
            simulate_path(P, 0)


class TestFilters:
    def test_candidate_reproduces_truth(self):
        s = simulate_path(P, 800, NoiseSource(4, 0))
        assert_array_equal(filter_candidate(P.theta0, P.a_init, s.y), s.a)

    def test_constant_fixed_point(self):
        assert_allclose(filter_candidate(1.8, 2.5, np.full(100, 2.5)), 2.5)

    def test_bounds(self):
        with pytest.raises(DomainError):
            filter_candidate(7.0, 0.0, np.ones(3), bounds=P.bounds)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(1.05, 6.0), st.floats(-5, 5), st.floats(-3, 3), st.integers(0, 2**32))
    def test_candidate_weight_identity(self, theta, a_start, alpha, seed):
        y = np.random.default_rng(seed).normal(alpha, 1.0, 500)
        n = y.size
        out = filter_candidate(theta, a_start, y)
        rep = alpha + (a_start - alpha) * phi(0, n, theta) + g_weights(n, theta) @ (y - alpha)
        assert abs(out[-1] - rep) <= 1e-8 * max(1.0, abs(out[-1]))

    def test_dagger_constant(self):
        out = filter_dagger(2.0, 1.5, np.full(20, 1.5), a_start=9.0)
        assert out[0] == 9.0
        assert_allclose(out[1:], 1.5)

    def test_dagger_first_step(self):
        out = filter_dagger(2.7, 0.4, np.array([1.4]))
        assert_allclose(out[1], 0.4 + 2.7 * 1.0)

    def test_dagger_vs_candidate(self):
        y = np.random.default_rng(2).normal(1.0, 1.0, 300)
        alpha, a, th = 1.0, 4.0, 2.3
        gap = np.abs(filter_candidate(th, a, y) - filter_dagger(th, alpha, y))
        ph = np.array([abs(phi(0, t, th)) for t in range(1, 301)])
        assert_allclose(gap[1:], abs(a - alpha) * ph, rtol=1e-9, atol=1e-14)


class TestDerivatives:
    Y = simulate_path(P, 2000, NoiseSource(8, 0)).y

    def test_constant_input(self):
        d = filter_derivatives(2.1, 1.0, np.ones(50), 4)
        assert d.shape == (4, 51)
        assert np.all(d == 0.0)

    def test_first_derivative_finite_difference(self):
        h = 1e-5
        d = filter_derivatives(1.8, P.alpha0, self.Y, 1)[0]
        fd = (filter_dagger(1.8 + h, P.alpha0, self.Y) - filter_dagger(1.8 - h, P.alpha0, self.Y)) / (2 * h)
        assert np.max(np.abs(d - fd)) < 1e-6

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_higher_derivatives_finite_difference(self, m):
        h = 1e-5
        d = filter_derivatives(1.8, P.alpha0, self.Y, m)
        up = filter_derivatives(1.8 + h, P.alpha0, self.Y, m - 1)[m - 2]
        dn = filter_derivatives(1.8 - h, P.alpha0, self.Y, m - 1)[m - 2]
        assert np.max(np.abs(d[m - 1] - (up - dn) / (2 * h))) < 1e-6

    def test_weight_derivative_representation(self):
        n = self.Y.size
        d = filter_derivatives(2.2, P.alpha0, self.Y, 2)
        G = g_derivatives(n, 2.2, 2)
        assert_allclose(d[0, -1], G[1] @ (self.Y - P.alpha0), rtol=1e-8)
        assert_allclose(d[1, -1], G[2] @ (self.Y - P.alpha0), rtol=1e-8)

    def test_order_domain(self):
        with pytest.raises(DomainError):
            filter_derivatives(2.0, 0.0, np.ones(3), 5)
