import math
from typing import Any, Dict, List, Optional

from ..config import SEQUENCE_PATTERNS
from ..sequences import (
    blowup_lower_bound_trend,
    blowup_ratio,
    log_inner_phi,
    moser_constraint,
    moser_integrals,
)
from .base_study import BaseStudy

CONSTRAINT_TOLERANCE = 1e-6


class MoserStudy(BaseStudy):
    """Normalization of u_k and the exact-growth ratio along k"""

    columns = [
        "k",
        "n",
        "alpha",
        "p",
        "C_k",
        "c_k_offset",
        "ln_norm",
        "k_ln_norm",
        "inner_norm_scaled",
        "constraint",
        "log_ratio",
        "ratio",
        "outcome",
        "trend",
    ]

    @property
    def power(self) -> float:
        n = self.ctx.n
        return self.config.p if self.config.p is not None else n / (n - 1)

    def evaluate(self, k: float) -> Dict[str, Any]:
        n = self.ctx.n
        alpha = self.config.alpha_factor * self.ctx.alpha
        p = self.power
        record = blowup_ratio(self.ctx, k, alpha, p)
        integrals = moser_integrals(self.ctx, k)
        item = record.as_dict()
        item.update(
            {
                "c_k_offset": record.C_k ** (n / (n - 1)) * k - k,
                "k_ln_norm": k * record.ln_norm,
                # k^(n-1) int_0^{e^-k} sinh^(n-1) against its order k^(n-1) e^(-nk)
                "inner_norm_scaled": math.exp(log_inner_phi(self.ctx, k) + n * k) / n,
                "constraint": moser_constraint(self.ctx, k),
                "trend": blowup_lower_bound_trend(self.ctx, k, alpha, p),
            }
        )
        self.logger.debug(f"k={k}: ratio {record.ratio:.6g}, constraint {item['constraint']:.12g}")
        return item

    def run(self) -> List[Dict[str, Any]]:
        k_values = self.config.k_values or SEQUENCE_PATTERNS["moser"]["k_values"]
        return self.map_items(self.evaluate, sorted(k_values))

    def regime(self) -> str:
        """Which sharpness behaviour the (alpha, p) pair should show"""
        n = self.ctx.n
        critical_power = n / (n - 1)
        if self.config.alpha_factor > 1.0:
            return "supercritical"
        if self.config.alpha_factor == 1.0 and self.power < critical_power and not math.isclose(
            self.power, critical_power
        ):
            return "weak_denominator"
        return "bounded"

    @staticmethod
    def growth_over_span(items: List[Dict[str, Any]], span: float) -> Optional[float]:
        """ratio(k') / ratio(k_first) for the first k' at least span beyond the first k"""
        first = items[0]
        for item in items[1:]:
            if item["k"] - first["k"] >= span:
                return item["ratio"] / first["ratio"] if first["ratio"] > 0 else None
        return None

    def summarize(self, items: List[Dict[str, Any]]) -> Dict[str, Any]:
        caps = SEQUENCE_PATTERNS["caps"]
        trend = SEQUENCE_PATTERNS["moser"]
        finite = [item["ratio"] for item in items if item["outcome"] == "finite"]
        ratios = [item["ratio"] for item in items]
        regime = self.regime()
        summary = {
            "regime": regime,
            "max_constraint_deviation": max(abs(item["constraint"] - 1.0) for item in items),
            "max_c_k_offset": max(abs(item["c_k_offset"]) for item in items),
            "max_k_ln_norm": max(item["k_ln_norm"] for item in items),
            "diverged_count": len(items) - len(finite),
            "ratio_spread": max(finite) / min(finite) if finite else None,
            "ratio_increasing": all(b > a for a, b in zip(ratios, ratios[1:])),
            "growth_first_to_last": ratios[-1] / ratios[0] if ratios[0] > 0 else None,
            "growth_over_span": self.growth_over_span(items, trend["growth_span"]),
        }

        if regime == "bounded":
            trend_ok = (
                summary["diverged_count"] == 0
                and summary["ratio_spread"] is not None
                and summary["ratio_spread"] <= caps["bounded_spread"]
            )
        elif regime == "weak_denominator":
            trend_ok = summary["ratio_increasing"]
        else:
            growth = summary["growth_over_span"]
            if growth is None:
                trend_ok = summary["ratio_increasing"]
            else:
                trend_ok = growth >= trend["growth_factor"]
        summary["trend_pass"] = trend_ok
        if not trend_ok:
            self.logger.warning(f"Sharpness trend check failed in the {regime} regime")

        summary["pass"] = (
            summary["max_constraint_deviation"] <= CONSTRAINT_TOLERANCE
            and summary["max_c_k_offset"] <= caps["c_k_offset"]
            and summary["max_k_ln_norm"] <= caps["k_times_ln_norm"]
            and trend_ok
        )
        return summary
