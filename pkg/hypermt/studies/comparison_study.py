from typing import Any, Dict, List

from ..functionals import extra_term
from ..verify import CorpusEntry, check_comparison, check_hardy, random_corpus, reduction_check
from .base_study import BaseStudy

IDENTITY_TOLERANCE = 1e-10


class ComparisonStudy(BaseStudy):
    columns = [
        "profile_id",
        "seed",
        "knots",
        "support",
        "sup_value",
        "weak_slack",
        "strong_slack",
        "hardy_slack",
        "reduction_slack",
        "extra_term",
        "identity_error",
        "tolerance",
        "pass",
    ]

    def evaluate(self, entry: CorpusEntry) -> Dict[str, Any]:
        v = entry.profile
        context = {"profile_id": entry.profile_id, "seed": entry.seed}
        weak = check_comparison(self.ctx, v, strong=False, context=context)
        strong = check_comparison(self.ctx, v, strong=True, context=context)
        hardy = check_hardy(self.ctx, v, context=context)
        reduction = reduction_check(self.ctx, v, self.config.lam)
        extra = extra_term(self.ctx, v)
        # weak slack - strong slack is the extra term
        scale = max(1.0, abs(extra), abs(weak.lhs), abs(weak.rhs))
        identity_error = abs(weak.slack - strong.slack - extra) / scale
        checks = (weak, strong, hardy, reduction)
        self.logger.debug(f"Profile {entry.profile_id}: strong slack {strong.slack:.3e}")
        return {
            "profile_id": entry.profile_id,
            "seed": entry.seed,
            "knots": int(v.knots.size),
            "support": v.support,
            "sup_value": v.sup_value,
            "weak_slack": weak.slack,
            "strong_slack": strong.slack,
            "hardy_slack": hardy.slack,
            "reduction_slack": reduction.slack,
            "extra_term": extra,
            "identity_error": identity_error,
            "tolerance": strong.tolerance,
            "pass": all(check.passed for check in checks) and identity_error <= IDENTITY_TOLERANCE,
        }

    def run(self) -> List[Dict[str, Any]]:
        corpus = random_corpus(self.config.seed, self.config.count)
        return self.map_items(self.evaluate, corpus)

    def summarize(self, items: List[Dict[str, Any]]) -> Dict[str, Any]:
        pass_count = sum(1 for item in items if item["pass"])
        summary = {
            "count": len(items),
            "pass_count": pass_count,
            "pass": pass_count == len(items),
        }
        for key in ("weak_slack", "strong_slack", "hardy_slack", "reduction_slack"):
            summary[f"min_{key}"] = min((item[key] for item in items), default=None)
        summary["max_identity_error"] = max((item["identity_error"] for item in items), default=0.0)
        return summary
