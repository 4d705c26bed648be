import math

import mpmath
import pytest

from hypermt.errors import DomainError
from hypermt.geometry import (
    ball_volume,
    euclidean_norm,
    geodesic_radius,
    k_kernel,
    log_phi,
    make_context,
    metric_factor,
    phi,
    phi_inv,
    phi_upper_bounds,
    polar_integral,
    sinh_n_minus_phi,
    tau_lambda,
    volume_element,
)
from hypermt.precision import Precision


class TestDimensionContext:
    def test_constants_n2(self):
        ctx = make_context(2)
        assert ctx.omega == pytest.approx(2 * math.pi)
        assert ctx.sigma == pytest.approx(math.pi)
        assert ctx.alpha == pytest.approx(4 * math.pi)
        assert ctx.hardy == 0.25

    def test_constants_n3(self):
        ctx = make_context(3)
        assert ctx.omega == pytest.approx(4 * math.pi)
        assert ctx.alpha == pytest.approx(3 * math.sqrt(4 * math.pi))
        assert ctx.hardy == pytest.approx(8 / 27)

    def test_sigma_is_omega_over_n(self, ctx):
        assert ctx.sigma == pytest.approx(ctx.omega / ctx.n)

    @pytest.mark.parametrize("bad", [1, 0, -3, 2.5, True])
    def test_rejects_bad_dimension(self, bad):
        with pytest.raises(DomainError):
            make_context(bad)


class TestBallModel:
    def test_geodesic_radius_round_trip(self):
        assert euclidean_norm(geodesic_radius(0.5)) == pytest.approx(0.5)
        assert geodesic_radius(0.5) == pytest.approx(math.log(3.0))

    def test_origin(self):
        assert geodesic_radius(0.0) == 0.0
        assert metric_factor(0.0) == 4.0
        assert volume_element(make_context(3), 0.0) == 8.0

    @pytest.mark.parametrize("x", [1.0, 1.5, -0.1])
    def test_rejects_outside_ball(self, x):
        with pytest.raises(DomainError):
            geodesic_radius(x)

    def test_tau_lambda(self, ctx2):
        assert tau_lambda(ctx2, 0.1) == pytest.approx(0.15)
        with pytest.raises(DomainError):
            tau_lambda(ctx2, 0.25)


class TestPhi:
    @pytest.mark.parametrize("r", [1e-4, 0.3, 1.0, 7.0])
    def test_n2_closed_form(self, ctx2, r):
        with mpmath.workdps(40):
            expected = float(2 * (mpmath.cosh(r) - 1))
        assert phi(ctx2, r) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("n", [3, 4, 6])
    @pytest.mark.parametrize("r", [0.05, 1.5, 4.0, 12.0])
    def test_matches_adaptive_quadrature(self, n, r):
        ctx = make_context(n)
        assert phi(ctx, r) == pytest.approx(phi(ctx, r, method="quadrature"), rel=1e-11)

    @pytest.mark.parametrize("n", [3, 5])
    @pytest.mark.parametrize("r", [1e-3, 0.7, 25.0])
    def test_matches_extended(self, n, r):
        ctx = make_context(n)
        exact = phi(ctx, r, Precision.EXTENDED)
        assert phi(ctx, r) == pytest.approx(float(exact), rel=1e-13)

    @pytest.mark.parametrize("r", [0.01, 2.0, 9.0])
    def test_extended_quadrature_route(self, ctx3, r):
        closed = phi(ctx3, r, Precision.EXTENDED)
        by_quadrature = phi(ctx3, r, Precision.EXTENDED, method="quadrature")
        with mpmath.workdps(40):
            assert abs(by_quadrature - closed) <= mpmath.mpf(10) ** -20 * closed

    def test_small_r_behaves_like_r_to_the_n(self, ctx):
        r = 1e-5
        assert phi(ctx, r) == pytest.approx(r**ctx.n, rel=1e-8)

    def test_log_phi_past_overflow(self):
        ctx = make_context(4)
        with mpmath.workdps(40):
            expected = float(mpmath.log(phi(ctx, 300, Precision.EXTENDED)))
        assert log_phi(ctx, 300.0) == pytest.approx(expected, rel=1e-13)

    @pytest.mark.parametrize("t", [0.2, 1.0, 3.0])
    def test_upper_bounds_are_strict(self, ctx, t):
        first, second = phi_upper_bounds(ctx, t)
        value = phi(ctx, t)
        assert value < first
        assert value < second

    @pytest.mark.parametrize("t", [1e-3, 0.5, 2.5])
    def test_sinh_n_minus_phi(self, ctx3, t):
        with mpmath.workdps(50):
            direct = float(mpmath.sinh(t) ** 3 - phi(ctx3, t, Precision.EXTENDED))
        assert sinh_n_minus_phi(ctx3, t) == pytest.approx(direct, rel=1e-12)

    def test_ball_volume(self, ctx3):
        assert ball_volume(ctx3, 2.0) == pytest.approx(ctx3.sigma * phi(ctx3, 2.0))

    def test_negative_radius(self, ctx3):
        with pytest.raises(DomainError):
            phi(ctx3, -1.0)


class TestPhiInverse:
    @pytest.mark.parametrize("s", [1e-12, 1e-3, 0.8, 40.0, 1e8])
    def test_inverts(self, ctx, s):
        t = phi_inv(ctx, s)
        assert phi(ctx, t) == pytest.approx(s, rel=1e-12)

    def test_zero(self, ctx):
        assert phi_inv(ctx, 0.0) == 0.0

    def test_negative(self, ctx):
        with pytest.raises(DomainError):
            phi_inv(ctx, -1e-3)

    def test_extended(self, ctx3):
        t = phi_inv(ctx3, 5.0, Precision.EXTENDED)
        with mpmath.workdps(40):
            assert abs(phi(ctx3, t, Precision.EXTENDED) - 5) < mpmath.mpf(10) ** -25


class TestKernel:
    @pytest.mark.parametrize("s", [0.0, 0.3, 12.0])
    def test_n2_quadratic(self, ctx2, s):
        assert k_kernel(ctx2, s) == pytest.approx(s * s / 4)

    @pytest.mark.parametrize("s", [1e-4, 0.5, 20.0])
    def test_matches_extended(self, ctx3, s):
        exact = float(k_kernel(ctx3, s, Precision.EXTENDED))
        assert k_kernel(ctx3, s) == pytest.approx(exact, rel=1e-10)

    def test_log_space_branch_matches_extended(self):
        # Phi^-1(1e45) is past 30 for n = 4
        ctx4 = make_context(4)
        exact = float(k_kernel(ctx4, 1e45, Precision.EXTENDED))
        assert k_kernel(ctx4, 1e45) == pytest.approx(exact, rel=1e-8)

    def test_beyond_double_range_is_infinite(self):
        assert k_kernel(make_context(8), 1e95) == math.inf

    @pytest.mark.parametrize("s", [0.1, 1.0, 10.0])
    def test_dominates_weighted_lower_bound(self, ctx, s):
        # k(s) >= ((n-1)/n)^n s^n
        assert k_kernel(ctx, s) >= ctx.hardy * s**ctx.n * (1 - 1e-12)


def test_polar_integral_of_one_is_ball_volume(ctx3):
    assert polar_integral(ctx3, lambda t: 1.0, 2.0) == pytest.approx(ball_volume(ctx3, 2.0), rel=1e-12)


class TestPolarIntegral:
    def test_cosh_in_dimension_three(self, ctx3):
        expected = 4.0 * math.pi * math.sinh(1.0) ** 3 / 3.0
        assert polar_integral(ctx3, math.cosh, 1.0) == pytest.approx(expected, rel=1e-10)

    def test_zero_integrand(self, ctx):
        assert polar_integral(ctx, lambda t: 0.0, 5.0) == 0.0

    @pytest.mark.parametrize("T", [0.5, 2.0, 10.0])
    def test_one_in_dimension_two(self, ctx2, T):
        expected = 2.0 * math.pi * (math.cosh(T) - 1.0)
        assert polar_integral(ctx2, lambda t: 1.0, T) == pytest.approx(expected, rel=1e-10)

    def test_rejects_inverted_interval(self, ctx3):
        with pytest.raises(DomainError):
            polar_integral(ctx3, math.cosh, 1.0, t_min=2.0)
