import math

import pytest

from hypermt.functionals import extra_term
from hypermt.studies import ComparisonStudy, MoserStudy, RunConfig


def _item(k, ratio, outcome="finite", c_k_offset=0.02):
    return {
        "k": float(k),
        "ratio": ratio,
        "outcome": outcome,
        "constraint": 1.0,
        "c_k_offset": c_k_offset,
        "k_ln_norm": 0.25,
    }


class TestMoserSummary:
    def _study(self, **overrides):
        return MoserStudy(RunConfig(command="moser", n=2, **overrides))

    def test_regimes(self):
        assert self._study().regime() == "bounded"
        assert self._study(p=1.0).regime() == "weak_denominator"
        assert self._study(alpha_factor=1.05, p=2.0).regime() == "supercritical"
        assert self._study(alpha_factor=0.5, p=1.0).regime() == "bounded"

    def test_bounded_spread(self):
        study = self._study()
        assert study.summarize([_item(5, 1.0), _item(40, 3.0)])["pass"]
        assert not study.summarize([_item(5, 1.0), _item(40, 30.0)])["pass"]
        assert not study.summarize([_item(5, 1.0), _item(40, math.inf, "diverged")])["pass"]

    def test_weak_denominator_must_grow(self):
        study = self._study(p=1.0)
        assert study.summarize([_item(5, 1.0), _item(10, 2.0), _item(20, 3.0)])["pass"]
        summary = study.summarize([_item(5, 1.0), _item(10, 2.0), _item(20, 2.0)])
        assert not summary["ratio_increasing"]
        assert not summary["pass"]

    def test_supercritical_growth_over_span(self):
        study = self._study(alpha_factor=1.05, p=2.0)
        assert study.summarize([_item(5, 75.6), _item(25, 801.0)])["pass"]
        summary = study.summarize([_item(5, 75.6), _item(25, 600.0)])
        assert summary["growth_over_span"] == pytest.approx(600.0 / 75.6)
        assert not summary["trend_pass"]
        assert not summary["pass"]

    def test_supercritical_short_span_needs_monotone_growth(self):
        study = self._study(alpha_factor=1.05, p=2.0)
        summary = study.summarize([_item(5, 1.0), _item(10, 2.0)])
        assert summary["growth_over_span"] is None
        assert summary["pass"]

    def test_normalization_caps_still_apply(self):
        study = self._study()
        assert not study.summarize([_item(5, 1.0), _item(10, 1.5, c_k_offset=6.0)])["pass"]

    def test_supercritical_run(self):
        report = self._study(alpha_factor=1.05, p=2.0, k_values=[5.0, 25.0]).execute()
        assert report.summary["growth_over_span"] >= 10.0
        assert report.passed


class TestComparisonStudy:
    def test_identity_holds(self):
        report = ComparisonStudy(RunConfig(command="verify-comparison", n=3, count=4, seed=11)).execute()
        assert report.summary["max_identity_error"] <= 1e-10
        assert report.passed

    def test_identity_error_fails_the_item(self, monkeypatch):
        monkeypatch.setattr(
            "hypermt.studies.comparison_study.extra_term", lambda ctx, v: 2.0 * extra_term(ctx, v) + 1e6
        )
        report = ComparisonStudy(RunConfig(command="verify-comparison", n=3, count=2, seed=11)).execute()
        assert report.summary["max_identity_error"] > 1e-10
        assert not any(item["pass"] for item in report.items)
        assert not report.passed
