import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from besseledge import asympt as am
from besseledge.errors import DomainError, RegimeError
from besseledge.fredholm import ExpMomentQuery
from besseledge.specfun import barnes_pair_ln

LOG2_OVER_2PI2 = math.log(2) / (2 * math.pi**2)


def mu_quadrature(p, x):
    val, _ = integrate.quad(lambda u: math.sqrt(u - p.a**2) / (2 * u), p.a**2, x, epsabs=1e-14, epsrel=1e-13)
    return math.sqrt(p.r) / math.pi * val


class TestEdgeParams:
    def test_alpha(self):
        p = am.EdgeParams(400.0, 1.5)
        assert p.alpha == 30.0
        assert p.gamma_euler == pytest.approx(0.5772156649015329, abs=1e-16)

    def test_rejects(self):
        with pytest.raises(DomainError):
            am.EdgeParams(-1.0, 1.0)


class TestMean:
    def test_closed_form_vs_quadrature(self):
        p = am.EdgeParams(400.0, 1.0)
        assert am.mu_alpha(p, 2.0) == pytest.approx(mu_quadrature(p, 2.0), abs=1e-10)

    @given(st.floats(0.05, 3.0), st.floats(0.01, 20.0), st.floats(1.0, 1e6))
    @settings(max_examples=40, deadline=None)
    def test_closed_form_grid(self, a, dx, r):
        p = am.EdgeParams(r, a)
        x = a * a + dx
        assert am.mu_alpha(p, x) == pytest.approx(mu_quadrature(p, x), rel=1e-9, abs=1e-12)

    def test_at_edge(self):
        assert am.mu_alpha(am.EdgeParams(9.0, 2.0), 4.0) == 0.0

    def test_a_zero(self):
        p = am.EdgeParams(100.0, 0.0)
        assert am.mu_alpha(p, 3.0) == pytest.approx(math.sqrt(300) / math.pi, rel=1e-15)
        assert am.mu_alpha(p, 3.0) == pytest.approx(am.mu_tilde(p, 3.0), rel=1e-15)

    def test_mu_tilde_unit(self):
        assert am.mu_tilde(am.EdgeParams(math.pi**2, 0.0), 1.0) == pytest.approx(1.0, rel=1e-15)

    def test_below_edge(self):
        with pytest.raises(DomainError):
            am.mu_alpha(am.EdgeParams(1.0, 2.0), 3.0)

    def test_derivative(self):
        alpha, xi, h = 10.0, 160.0, 1e-4
        fd = (am.mu_unscaled(alpha, xi + h) - am.mu_unscaled(alpha, xi - h)) / (2 * h)
        assert am.mu_alpha_derivative(alpha, xi) == pytest.approx(fd, rel=1e-8)


class TestVariance:
    def test_value(self):
        assert am.sigma2_alpha(am.EdgeParams(1.0, 1.0), 2.0) == pytest.approx(LOG2_OVER_2PI2, rel=1e-14)

    @given(st.floats(1.0, 1e8), st.floats(0.0, 3.0), st.floats(0.01, 30.0))
    @settings(max_examples=40, deadline=None)
    def test_two_printed_forms(self, r, a, dx):
        p = am.EdgeParams(r, a)
        x = a * a + dx
        unscaled = math.log(4 * (r * x - p.alpha**2) ** 1.5 / (r * x)) / (2 * math.pi**2)
        assert am.sigma2_alpha(p, x) == pytest.approx(unscaled, rel=1e-12, abs=1e-13)
        assert am.sigma2_unscaled(p.alpha, r * x) == pytest.approx(unscaled, rel=1e-12, abs=1e-13)

    def test_log_linear_in_r(self):
        a, x = 1.0, 3.0
        d = am.sigma2_alpha(am.EdgeParams(400.0, a), x) - am.sigma2_alpha(am.EdgeParams(100.0, a), x)
        assert d == pytest.approx(math.log(4) / (4 * math.pi**2), rel=1e-12)

    def test_constant(self):
        assert am.VARIANCE_CONSTANT == pytest.approx((1 + 0.5772156649015329) / (2 * math.pi**2), rel=1e-15)


class TestCovariance:
    def test_value(self):
        assert am.cov_sigma_a(1.0, 2.0, 10.0) == pytest.approx(LOG2_OVER_2PI2, rel=1e-14)

    @given(st.floats(0.0, 2.0), st.floats(0.01, 10.0), st.floats(0.01, 10.0))
    @settings(max_examples=40, deadline=None)
    def test_symmetric(self, a, d1, d2):
        if d1 == d2:
            return
        x1, x2 = a * a + d1, a * a + d2
        assert am.cov_sigma_a(a, x1, x2) == am.cov_sigma_a(a, x2, x1)

    def test_equal_points(self):
        with pytest.raises(DomainError):
            am.cov_sigma_a(1.0, 2.0, 2.0)

    def test_small_a_limit(self):
        diffs = [abs(am.cov_sigma_a(a, 1.0, 3.0) - am.cov_sigma_tilde(1.0, 3.0)) for a in (0.02, 0.01)]
        assert diffs[0] / diffs[1] == pytest.approx(4.0, rel=0.02)


class TestInverse:
    def test_zero(self):
        assert am.mu_alpha_inverse(am.EdgeParams(400.0, 1.0), 0) == 400.0

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 20.0, 300.0])
    def test_round_trip(self, alpha):
        for k in (1e-6, 0.3, 1.0, 7.0, 80.0, 1e4):
            xi = am.mu_inverse_unscaled(alpha, k)
            assert abs(am.mu_unscaled(alpha, xi) - k) <= 1e-10 * max(1.0, k)

    def test_monotone(self):
        ks = np.linspace(0, 50, 60)
        vals = [am.mu_inverse_unscaled(30.0, k) for k in ks]
        assert np.all(np.diff(vals) > 0)

    def test_negative(self):
        with pytest.raises(DomainError):
            am.mu_inverse_unscaled(1.0, -1.0)


class TestRegimes:
    def test_parse(self):
        assert am.Regime.parse("1") is am.Regime.LARGE_A
        assert am.Regime.parse("bounded") is am.Regime.BOUNDED_ALPHA
        with pytest.raises(ValueError):
            am.Regime.parse("7")

    def test_zero_u(self):
        q = ExpMomentQuery(400.0, 1.0, (2.0, 4.0), (0.0, 0.0))
        assert am.log_exp_moment_asympt(q, am.Regime.LARGE_A).value == 0.0
        assert am.log_exp_moment_bounded_alpha(ExpMomentQuery(400.0, 0.5, (2.0, 4.0), (0.0, 0.0))).value == 0.0

    def test_all_below_edge(self):
        q = ExpMomentQuery(400.0, 3.0, (2.0, 4.0), (0.7, -1.1))
        assert am.log_exp_moment_asympt(q, am.Regime.LARGE_A).value == 0.0

    def test_only_points_above_edge_count(self):
        full = am.log_exp_moment_asympt(ExpMomentQuery(400.0, 1.0, (0.5, 2.0, 4.0), (0.9, 0.5, -0.3)), "1")
        tail = am.log_exp_moment_asympt(ExpMomentQuery(400.0, 1.0, (2.0, 4.0), (0.5, -0.3)), "1")
        assert full.value == tail.value

    def test_block_structure(self):
        p = am.EdgeParams(900.0, 1.0)
        u, x = (0.5, -0.3), (2.0, 4.0)
        expected = (
            sum(ui * am.mu_alpha(p, xi) for ui, xi in zip(u, x))
            + sum(0.5 * ui**2 * am.sigma2_alpha(p, xi) for ui, xi in zip(u, x))
            + u[0] * u[1] * am.cov_sigma_a(1.0, 2.0, 4.0)
            + sum(barnes_pair_ln(ui) for ui in u)
        )
        pred = am.log_exp_moment_asympt(ExpMomentQuery(900.0, 1.0, x, u), am.Regime.LARGE_A)
        assert pred.value == pytest.approx(expected, rel=1e-14)
        assert sum(pred.blocks.values()) == pytest.approx(pred.value, rel=1e-14)

    def test_drop_trailing_zero(self):
        a = am.log_exp_moment_asympt(ExpMomentQuery(400.0, 1.0, (2.0, 4.0), (0.5, 0.0)), "1").value
        b = am.log_exp_moment_asympt(ExpMomentQuery(400.0, 1.0, (2.0,), (0.5,)), "1").value
        assert a == pytest.approx(b, rel=1e-14)

    def test_error_tags(self):
        q = ExpMomentQuery(400.0, 1.0, (2.0, 4.0), (0.5, -0.3))
        assert am.log_exp_moment_asympt(q, "1").error_scale == pytest.approx(math.log(400) / 20)
        near = am.log_exp_moment_asympt(q, "3")
        assert near.error_scale == pytest.approx(math.log(400) / (3.0**4 * 20))

    def test_regime_preconditions(self):
        q = ExpMomentQuery(400.0, 2.5, (2.0, 7.0), (0.5, -0.3))
        with pytest.raises(RegimeError):
            am.log_exp_moment_asympt(q, "2")
        with pytest.raises(RegimeError):
            am.log_exp_moment_asympt(q, "3")
        with pytest.raises(RegimeError):
            am.log_exp_moment_asympt(q, "airy")

    def test_bounded_alpha_difference_quadratic(self):
        r = 1e4
        d = []
        for a in (0.02, 0.01):
            q = ExpMomentQuery(r, a, (1.0, 2.0), (0.5, -0.3))
            d.append(abs(am.log_exp_moment_bounded_alpha(q).value - am.log_exp_moment_asympt(q, "2").value))
        assert d[0] / d[1] == pytest.approx(4.0, rel=0.05)


class TestAiry:
    def test_mean(self):
        assert am.mu_airy(1.0) == pytest.approx(2 / (3 * math.pi), rel=1e-15)

    def test_variance_log_linear(self):
        assert am.sigma2_airy(8.0) - am.sigma2_airy(2.0) == pytest.approx(3 / (4 * math.pi**2) * math.log(4), rel=1e-13)

    def test_zero_u(self):
        assert am.airy_moment_forms((1.0, 2.0), (0.0, 0.0), 10.0).value == 0.0

    @pytest.mark.parametrize("a,r,r_ai", [(1.0, 1e6, 50.0), (0.5, 1e8, 100.0), (3.0, 1e10, 300.0)])
    def test_covariance_blocks_equal(self, a, r, r_ai):
        ys = (0.7, 1.0, 2.5)
        xs = am.airy_scaled_points(a, ys, r, r_ai)
        for j in range(3):
            for k in range(j + 1, 3):
                assert abs(am.cov_sigma_a(a, xs[j], xs[k]) - am.cov_sigma_airy(ys[j], ys[k])) <= 1e-12

    def test_mean_matching_trend(self):
        tags, diffs = [], []
        for r, r_ai in ((1e6, 50.0), (1e12, 3000.0)):
            rep = am.airy_matching_check(1.0, (1.0, 2.0), (0.3, 0.2), r, r_ai)
            tags.append(rep.mean_rel_tag)
            diffs.append(max(abs(v) for v in rep.mean_rel_diff))
            assert max(abs(v) for v in rep.mean_rel_diff) <= 3 * rep.mean_rel_tag
        assert diffs[1] < diffs[0]

    def test_sandwich(self):
        with pytest.raises(RegimeError):
            am.airy_matching_check(1.0, (1.0,), (0.3,), 1e6, 5.0)

    def test_degenerate_u(self):
        rep = am.airy_matching_check(1.0, (1.0, 2.0), (0.0, 0.0), 1e6, 50.0)
        assert rep.bessel.value == 0.0 and rep.airy.value == 0.0
