import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypermt.errors import DomainError
from hypermt.functionals import ln_norm
from hypermt.geometry import make_context
from hypermt.precision import Precision
from hypermt.verify import (
    InequalityCheckResult,
    LemmaGrid,
    check_comparison,
    check_constraint_norm,
    check_derivative_chain,
    check_hardy,
    check_phi_bounds,
    elementary_inequality,
    lemma_F,
    lemma_G,
    lemma_grid,
    lemma_H,
    normalize_to_constraint,
    random_corpus,
    reduction_check,
    small_t_ratio,
    sweep_lemma,
)


class TestLemmaFunctions:
    @pytest.mark.parametrize("t", [1e-4, 0.3, 2.0, 8.0])
    def test_equality_in_dimension_two(self, ctx2, t):
        assert abs(lemma_F(ctx2, t)) <= 1e-12 * max(1.0, math.sinh(t) ** 2)

    @pytest.mark.parametrize("n", [3, 4, 6])
    @pytest.mark.parametrize("t", [0.01, 0.5, 3.0, 15.0])
    def test_non_negative(self, n, t):
        ctx = make_context(n)
        assert lemma_F(ctx, t) >= 0
        assert lemma_G(ctx, t) >= 0
        assert lemma_H(ctx, t) >= 0

    @pytest.mark.parametrize("t", [0.7, 2.0, 6.0])
    def test_double_agrees_with_extended(self, ctx3, t):
        exact = float(lemma_F(ctx3, t, Precision.EXTENDED))
        assert float(lemma_F(ctx3, t)) == pytest.approx(exact, rel=1e-6)

    def test_origin(self, ctx3):
        assert lemma_F(ctx3, 0.0) == 0.0
        assert lemma_G(ctx3, 0.0) == 0.0

    def test_negative_t(self, ctx3):
        with pytest.raises(DomainError):
            lemma_F(ctx3, -0.1)

    def test_upper_branch_needs_dimension_three(self, ctx2):
        with pytest.raises(DomainError):
            lemma_G(ctx2, 1.0)
        with pytest.raises(DomainError):
            lemma_H(ctx2, 1.0)

    def test_large_t_falls_back_to_extended(self):
        ctx = make_context(5)
        value = lemma_F(ctx, 60.0)
        assert value > 0
        assert not isinstance(value, float)

    def test_small_t_ratio(self, ctx3):
        assert small_t_ratio(ctx3, 1e-6) >= 0.0


class TestLemmaGrid:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"t_min": 1e-3, "t_max": 1.0, "count": 1},
            {"t_min": 1e-3, "t_max": 1.0, "count": 5, "spacing": "cubic"},
            {"t_min": 0.0, "t_max": 1.0, "count": 5, "spacing": "log"},
            {"t_min": 2.0, "t_max": 1.0, "count": 5},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(DomainError):
            LemmaGrid(**kwargs)

    def test_linear_excludes_left_end(self):
        points = LemmaGrid(0.0, 1.0, 4, "linear").points()
        np.testing.assert_allclose(points, [0.25, 0.5, 0.75, 1.0])

    def test_log_spacing(self):
        points = lemma_grid(1e-6, 20.0, 50).points()
        assert points[0] == pytest.approx(1e-6)
        assert points[-1] == pytest.approx(20.0)
        assert np.allclose(np.diff(np.log(points)), np.log(points[1] / points[0]))


class TestSweep:
    def test_dimension_two(self, ctx2):
        report = sweep_lemma(ctx2, lemma_grid(1e-6, 20.0, 200))
        assert report.passed
        assert report.equality_deviation <= 1e-10
        assert report.min_slack_G is None
        assert report.as_dict()["pass"] is True

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_small_grid(self, n):
        report = sweep_lemma(make_context(n), lemma_grid(1e-6, 20.0, 200))
        assert report.passed, report.failures
        assert report.min_slack_F >= -1e-12
        assert report.min_slack_G >= -1e-12
        assert report.min_slack_H >= -1e-12
        assert report.extended_points > 0

    def test_forced_extended(self, ctx3):
        report = sweep_lemma(ctx3, lemma_grid(1e-2, 5.0, 20), Precision.EXTENDED)
        assert report.passed
        assert report.extended_points == 20

    @pytest.mark.slow
    @pytest.mark.parametrize("n", range(3, 9))
    def test_full_grid(self, n):
        report = sweep_lemma(make_context(n), lemma_grid(1e-6, 20.0, 10000))
        assert report.passed, report.failures


class TestDerivativeChain:
    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_claims_hold(self, n):
        results = check_derivative_chain(make_context(n), [0.1, 1.0, 3.0])
        assert len(results) == 6
        assert all(r.passed for r in results), [r.as_dict() for r in results if not r.passed]

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_twenty_points(self, n):
        results = check_derivative_chain(make_context(n), np.geomspace(0.05, 8.0, 20))
        assert len(results) == 40
        assert all(r.passed for r in results), [r.as_dict() for r in results if not r.passed]

    def test_needs_dimension_three(self, ctx2):
        with pytest.raises(DomainError):
            check_derivative_chain(ctx2, [1.0])


def test_phi_bounds(ctx):
    results = check_phi_bounds(ctx, np.geomspace(0.01, 30.0, 25))
    assert len(results) == 50
    assert all(r.passed for r in results)


class TestComparison:
    @pytest.fixture
    def corpus(self):
        return random_corpus(seed=7, count=12)

    def test_weak_and_strong(self, ctx, corpus):
        for entry in corpus:
            context = {"profile_id": entry.profile_id}
            assert check_comparison(ctx, entry.profile, strong=False, context=context).passed
            assert check_comparison(ctx, entry.profile, strong=True, context=context).passed

    def test_strong_is_an_identity_in_dimension_two(self, ctx2, corpus):
        for entry in corpus:
            result = check_comparison(ctx2, entry.profile, strong=True)
            assert abs(result.slack) <= 1e-8 * (1.0 + abs(result.lhs))

    def test_hardy(self, ctx, corpus):
        assert all(check_hardy(ctx, e.profile).passed for e in corpus)

    def test_reduction(self, ctx3, corpus):
        lam = 0.5 * ctx3.hardy
        assert all(reduction_check(ctx3, e.profile, lam).passed for e in corpus)

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_full_corpus(self, n):
        ctx = make_context(n)
        for entry in random_corpus(seed=7, count=100):
            weak = check_comparison(ctx, entry.profile, strong=False)
            strong = check_comparison(ctx, entry.profile, strong=True)
            assert weak.passed and strong.passed, entry.profile_id
            assert check_hardy(ctx, entry.profile).passed, entry.profile_id

    def test_context_is_recorded(self, ctx3, cone):
        result = check_comparison(ctx3, cone, strong=False, context={"profile_id": 4})
        assert result.context == {"n": 3, "strong": False, "knots": 2, "profile_id": 4}


class TestConstraint:
    def test_lambda_domain(self, ctx3, cone):
        with pytest.raises(DomainError):
            check_constraint_norm(ctx3, cone, ctx3.hardy * 1.01)
        with pytest.raises(DomainError):
            check_constraint_norm(ctx3, cone, -0.1)

    def test_normalization(self, ctx3, staircase):
        lam = 0.2
        normalized = normalize_to_constraint(ctx3, staircase, lam)
        assert check_constraint_norm(ctx3, normalized, lam) == pytest.approx(1.0, rel=1e-10)

    def test_constraint_at_hardy_is_positive(self, ctx3, staircase):
        value = check_constraint_norm(ctx3, staircase, ctx3.hardy)
        assert value > 0.0
        assert value < check_constraint_norm(ctx3, staircase, 0.0)
        assert ln_norm(staircase, 3) > 0.0


class TestElementaryInequality:
    @settings(max_examples=200, deadline=None)
    @given(
        b=st.floats(min_value=0.0, max_value=10.0),
        fraction=st.floats(min_value=-2.0, max_value=1.0),
        n=st.integers(min_value=2, max_value=8),
    )
    def test_holds(self, b, fraction, n):
        assert elementary_inequality(fraction * b, b, n).passed

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_seeded_pairs(self, n):
        rng = np.random.default_rng(1000 + n)
        b = rng.uniform(0.0, 10.0, 100_000)
        a = b * rng.uniform(-2.0, 1.0, b.size)
        failures = [
            (x, y) for x, y in zip(a, b) if not elementary_inequality(float(x), float(y), n).passed
        ]
        assert not failures, failures[:5]

    def test_equality_for_n2(self):
        result = elementary_inequality(-1.5, 2.0, 2)
        assert result.slack == pytest.approx(0.0, abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            elementary_inequality(2.0, 1.0, 3)
        with pytest.raises(DomainError):
            elementary_inequality(-2.0, -1.0, 3)


def test_random_corpus_is_deterministic():
    first = random_corpus(3, 5)
    second = random_corpus(3, 5)
    assert [e.profile for e in first] == [e.profile for e in second]
    assert [e.profile_id for e in first] == list(range(5))
    for entry in first:
        assert 2 <= entry.profile.knots.size <= 50
        assert 1e-3 * (1 - 1e-12) <= entry.profile.support <= 1e3 * (1 + 1e-12)


def test_check_result_dict_uses_pass_key():
    record = InequalityCheckResult.build("x", 2.0, 1.0, 0.0).as_dict()
    assert record["pass"] is True
    assert record["slack"] == 1.0
    assert "passed" not in record
