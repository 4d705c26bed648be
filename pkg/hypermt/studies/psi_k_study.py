from typing import Any, Dict, List

from ..config import SEQUENCE_PATTERNS
from ..sequences import PsiKRecord, beta_ratio, fit_power_law, psi_k_closed_forms, psi_k_sweep
from .base_study import BaseStudy

QUADRATURE_TOLERANCE = 1e-8
LIMIT_TOLERANCE = 1e-3
BETA_RATIO_TOLERANCE = 1e-4


def _relative(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


class PsiKStudy(BaseStudy):
    """Closed forms against quadrature, then the k -> infinity limit of the normalization"""

    columns = [
        "role",
        "n",
        "k",
        "lam",
        "ln_norm_closed",
        "ln_norm_quadrature",
        "ln_norm_error",
        "energy_closed",
        "energy_quadrature",
        "energy_error",
        "a_k_n",
        "product",
        "limit_target",
        "limit_gap",
        "beta_ratio",
    ]

    def _item(self, record: PsiKRecord, role: str) -> Dict[str, Any]:
        item = {"role": role, **record.as_dict(), "beta_ratio": beta_ratio(record.k, record.n)}
        if record.ln_norm_quadrature is not None:
            item["ln_norm_error"] = _relative(record.ln_norm_quadrature, record.ln_norm_closed)
            item["energy_error"] = _relative(record.energy_quadrature, record.energy_closed)
        return item

    def run(self) -> List[Dict[str, Any]]:
        lam = self.config.lam
        k_values = self.config.k_values or SEQUENCE_PATTERNS["psi_k"]["k_values"]
        items = [self._item(r, "closed-form") for r in psi_k_sweep(self.ctx, k_values, lam)]
        for k in SEQUENCE_PATTERNS["psi_k"]["limit_k_values"]:
            items.append(self._item(psi_k_closed_forms(self.ctx, k, lam), "limit"))
        return items

    def summarize(self, items: List[Dict[str, Any]]) -> Dict[str, Any]:
        checked = [item for item in items if item["role"] == "closed-form"]
        limit = [item for item in items if item["role"] == "limit"]
        last = limit[-1]
        max_error = max(
            (max(item["ln_norm_error"], item["energy_error"]) for item in checked), default=0.0
        )
        gap_exponent, _ = fit_power_law(
            [item["k"] for item in limit], [item["limit_gap"] for item in limit]
        )
        relative_gap = abs(last["limit_gap"]) / last["limit_target"]
        beta_gap = abs(last["beta_ratio"] - 1.0)
        summary = {
            "max_quadrature_error": max_error,
            "limit_gap_at_max_k": relative_gap,
            "limit_gap_exponent": gap_exponent,
            "approach": "from below" if last["limit_gap"] < 0.0 else "from above",
            "beta_ratio_gap": beta_gap,
        }
        summary["pass"] = (
            max_error <= QUADRATURE_TOLERANCE
            and relative_gap <= LIMIT_TOLERANCE
            and beta_gap <= BETA_RATIO_TOLERANCE
        )
        return summary
