from typing import Any, Dict, List

from ..config import SEQUENCE_PATTERNS
from ..sequences import lower_bound, mt_lower_bound_sequence
from .base_study import BaseStudy


class LowerBoundStudy(BaseStudy):
    columns = ["k", "n", "lam", "value", "first_term_bound", "limit", "pass"]

    def evaluate(self, k: float) -> Dict[str, Any]:
        record = mt_lower_bound_sequence(self.ctx, k, self.config.lam)
        item = record.as_dict()
        item["pass"] = record.value >= record.first_term_bound * (1.0 - 1e-10)
        return item

    def run(self) -> List[Dict[str, Any]]:
        k_values = self.config.k_values or SEQUENCE_PATTERNS["psi_k"]["limit_k_values"]
        return self.map_items(self.evaluate, sorted(k_values))

    def summarize(self, items: List[Dict[str, Any]]) -> Dict[str, Any]:
        bound = lower_bound(self.ctx, self.config.lam)
        return {
            "lower_bound": bound,
            "last_first_term_bound": items[-1]["first_term_bound"] if items else None,
            "pass": all(item["pass"] for item in items),
        }
