import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypermt.errors import DomainError
from hypermt.geometry import make_context, phi
from hypermt.profiles import (
    EuclideanRadialFunction,
    HyperbolicRadialFunction,
    RadialProfile,
    distribution_function,
    dump_profile,
    euclidean_realization,
    hyperbolic_realization,
    load_profile,
    profile_from_dict,
    profile_from_euclidean,
    profile_from_hyperbolic,
    random_profile,
    w_transform,
)


class TestValidation:
    @pytest.mark.parametrize(
        "knots, values",
        [
            ([0.0, 1.0], [1.0, 0.5]),  # no compact support
            ([0.0, 1.0, 2.0], [1.0, 1.5, 0.0]),  # increasing
            ([0.1, 1.0], [1.0, 0.0]),  # first knot
            ([0.0, 1.0, 1.0], [1.0, 0.5, 0.0]),  # repeated knot
            ([0.0, 1.0], [-1.0, 0.0]),
            ([0.0, np.inf], [1.0, 0.0]),
        ],
    )
    def test_rejects_invalid(self, knots, values):
        with pytest.raises(DomainError):
            RadialProfile(knots, values)

    def test_arrays_are_read_only(self, cone):
        with pytest.raises(ValueError):
            cone.values[0] = 3.0

    def test_single_zero_knot(self):
        v = RadialProfile([0.0], [0.0])
        assert v.is_zero
        assert v.segment_count == 0


class TestEvaluation:
    def test_interpolates_and_vanishes_past_support(self, staircase):
        assert staircase(0.25) == pytest.approx(1.75)
        assert staircase(1.0) == 1.5
        assert staircase(100.0) == 0.0
        np.testing.assert_allclose(staircase(np.array([0.0, 0.5, 7.5])), [2.0, 1.5, 0.0])

    def test_scaled_drops_sign(self, cone):
        assert cone.scaled(-2.0) == RadialProfile([0.0, 1.0], [2.0, 0.0])

    def test_slopes(self, staircase):
        np.testing.assert_allclose(staircase.slopes(), [-1.0, 0.0, -1.3, -0.2 / 4.5])


class TestRealizations:
    def test_zero_hyperbolic_function_gives_zero_profile(self, ctx2):
        v = profile_from_hyperbolic(ctx2, HyperbolicRadialFunction([0.0, 1.0], [0.0, 0.0]))
        assert v.is_zero

    def test_cone_in_geodesic_radius_n2(self, ctx2):
        v = profile_from_hyperbolic(ctx2, HyperbolicRadialFunction([0.0, 1.0], [1.0, 0.0]))
        np.testing.assert_allclose(v.knots, [0.0, math.pi * 2 * (math.cosh(1.0) - 1)], rtol=1e-13)
        np.testing.assert_array_equal(v.values, [1.0, 0.0])

    def test_hyperbolic_round_trip_keeps_values_exact(self, ctx3, staircase):
        u = hyperbolic_realization(ctx3, staircase)
        back = profile_from_hyperbolic(ctx3, u)
        np.testing.assert_array_equal(back.values, staircase.values)
        np.testing.assert_allclose(back.knots, staircase.knots, rtol=1e-12)

    def test_radial_function_reproduced(self, ctx3):
        u = HyperbolicRadialFunction([0.0, 0.4, 2.0], [3.0, 1.0, 0.0])
        again = hyperbolic_realization(ctx3, profile_from_hyperbolic(ctx3, u))
        np.testing.assert_allclose(again.radius_knots, u.radius_knots, rtol=1e-12, atol=1e-15)

    def test_unit_measure_maps_to_unit_euclidean_ball(self, ctx):
        v = RadialProfile([0.0, ctx.sigma], [1.0, 0.0])
        u = euclidean_realization(ctx, v)
        np.testing.assert_allclose(u.radius_knots, [0.0, 1.0])

    def test_euclidean_round_trip(self, ctx3, staircase):
        back = profile_from_euclidean(ctx3, euclidean_realization(ctx3, staircase))
        np.testing.assert_allclose(back.knots, staircase.knots, rtol=1e-13)

    def test_euclidean_knots_bound_the_superlevel_ball(self, ctx3):
        v = random_profile(11, 9, 5.0, 2.0)
        u = euclidean_realization(ctx3, v)
        assert isinstance(u, EuclideanRadialFunction)
        # {u_e > v_i} has measure s_i at every knot below the top plateau
        for r, s, value in zip(u.radius_knots[1:], v.knots[1:], v.values[1:]):
            if value < v.values[0]:
                assert ctx3.sigma * r**3 == pytest.approx(s, rel=1e-13)
                assert u(r) == pytest.approx(value)

    def test_hyperbolic_ball_volume_matches_measure(self, ctx3, staircase):
        u = hyperbolic_realization(ctx3, staircase)
        for t, s in zip(u.radius_knots, staircase.knots):
            assert ctx3.sigma * phi(ctx3, t) == pytest.approx(s, rel=1e-12, abs=1e-300)


class TestDistributionFunction:
    def test_above_sup(self, staircase):
        assert distribution_function(staircase, 2.0) == 0.0
        assert distribution_function(staircase, 5.0) == 0.0

    def test_interpolated_crossing(self, staircase):
        # between v(2) = 1.5 and v(3) = 0.2
        assert distribution_function(staircase, 0.85) == pytest.approx(2.5)

    def test_small_level_tends_to_support(self, staircase):
        assert distribution_function(staircase, 1e-12) == pytest.approx(7.5)

    def test_generalized_inverse(self, staircase):
        for level in (0.1, 0.9, 1.7):
            assert staircase(distribution_function(staircase, level)) == pytest.approx(level)

    def test_rejects_non_positive_level(self, staircase):
        with pytest.raises(DomainError):
            distribution_function(staircase, 0.0)


class TestWTransform:
    def test_zero(self):
        w = w_transform(RadialProfile.zero(), 3)
        assert w(0.5) == 0.0

    def test_constant_part(self):
        v = RadialProfile([0.0, 2.0, 3.0], [1.5, 1.5, 0.0])
        w = w_transform(v, 3)
        assert w(1.0) == pytest.approx(1.5)
        assert w(0.008) == pytest.approx(1.5 * 0.2)

    @pytest.mark.parametrize("s", [0.3, 1.2, 2.7, 5.0])
    def test_derivative_against_central_difference(self, staircase, s):
        w = w_transform(staircase, 4)
        h = 1e-6
        numeric = (w(s + h) - w(s - h)) / (2 * h)
        assert w.derivative(s) == pytest.approx(numeric, rel=1e-6)


class TestRandomProfile:
    def test_deterministic(self):
        assert random_profile(5, 20, 3.0, 2.0) == random_profile(5, 20, 3.0, 2.0)

    @pytest.mark.parametrize("seed", range(1, 101))
    def test_valid_with_twenty_knots(self, seed):
        v = random_profile(seed, 20, 1.0, 1.0)
        assert v.knots.size == 20
        assert np.all(np.diff(v.values) <= 0.0)

    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=2**31),
        n_knots=st.integers(min_value=2, max_value=50),
        log_support=st.floats(min_value=-3.0, max_value=3.0),
        max_value=st.floats(min_value=1e-3, max_value=10.0),
    )
    def test_invariants(self, seed, n_knots, log_support, max_value):
        v = random_profile(seed, n_knots, 10.0**log_support, max_value)
        assert v.knots[0] == 0.0
        assert v.values[-1] == 0.0
        assert v.sup_value <= max_value
        assert v.support == pytest.approx(10.0**log_support)


class TestSerialization:
    def test_dump_and_load(self, tmp_path, staircase):
        path = tmp_path / "profile.json"
        dump_profile(staircase, 3, str(path))
        n, loaded = load_profile(str(path))
        assert n == 3
        assert loaded == staircase

    def test_missing_field(self):
        with pytest.raises(DomainError, match="knots"):
            profile_from_dict({"n": 2, "values": [0.0]})

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_profile(str(tmp_path / "absent.json"))


def test_make_context_is_shared():
    assert make_context(3) is make_context(3)
