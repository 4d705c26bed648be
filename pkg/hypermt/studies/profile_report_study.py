from typing import Any, Dict, List

from ..errors import ConfigError, OverflowRegimeError
from ..functionals import (
    energy_report,
    exact_growth_ratio,
    hyperbolic_energy,
    kernel_energy,
    mt_functional,
    weighted_energy,
)
from ..profiles import RadialProfile, load_profile, random_profile
from ..verify import check_comparison, check_hardy
from .base_study import BaseStudy

DEFAULT_KNOTS = 12


class ProfileReportStudy(BaseStudy):
    """Every functional of one profile, read from --profile or drawn from --seed"""

    columns = [
        "source",
        "n",
        "knots",
        "support",
        "hyperbolic_energy",
        "hyperbolic_energy_s_route",
        "kernel_energy",
        "euclidean_energy",
        "weighted_energy",
        "ln_norm",
        "extra_term",
        "quad_error_estimate",
        "mt_functional",
        "exact_growth_ratio",
        "comparison_slack",
        "hardy_slack",
        "pass",
    ]

    def load(self) -> RadialProfile:
        if self.config.profile is None:
            return random_profile(self.config.seed, DEFAULT_KNOTS, 1.0, 1.0)
        n, profile = load_profile(self.config.profile)
        if n != self.config.n:
            raise ConfigError("n", f"profile file is for n={n}, run requested n={self.config.n}")
        return profile

    def run(self) -> List[Dict[str, Any]]:
        v = self.load()
        alpha = self.config.alpha_factor * self.ctx.alpha
        item = {
            "source": self.config.profile or f"random(seed={self.config.seed})",
            "n": self.ctx.n,
            "knots": int(v.knots.size),
            "support": v.support,
            **energy_report(self.ctx, v).as_dict(),
            "hyperbolic_energy_s_route": hyperbolic_energy(self.ctx, v, route="s"),
            "kernel_energy": kernel_energy(self.ctx, v),
            "weighted_energy": weighted_energy(self.ctx, v),
        }
        try:
            item["mt_functional"] = mt_functional(self.ctx, v, alpha)
            item["exact_growth_ratio"] = (
                None if v.is_zero else exact_growth_ratio(self.ctx, v, alpha, self.config.p)
            )
        except OverflowRegimeError as e:
            self.logger.warning(f"Moser-Trudinger functionals skipped: {e}")
            item["mt_functional"] = item["exact_growth_ratio"] = None
        comparison = check_comparison(self.ctx, v, strong=True)
        hardy = check_hardy(self.ctx, v)
        item["comparison_slack"] = comparison.slack
        item["hardy_slack"] = hardy.slack
        item["pass"] = comparison.passed and hardy.passed
        return [item]

    def summarize(self, items: List[Dict[str, Any]]) -> Dict[str, Any]:
        return {"pass": all(item["pass"] for item in items)}
