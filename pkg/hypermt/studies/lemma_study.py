from typing import Any, Dict, List

import numpy as np

from ..precision import Precision
from ..verify import LemmaGrid, check_derivative_chain, check_phi_bounds, sweep_lemma
from .base_study import BaseStudy

# Sample radii for the finite-difference cross-check of F' and G'
DERIVATIVE_POINTS = np.geomspace(0.05, 8.0, 20)
PHI_BOUND_POINTS = 50
EQUALITY_TOLERANCE = 1e-10


class LemmaStudy(BaseStudy):
    columns = [
        "check",
        "n",
        "min_slack_F",
        "argmin_F",
        "min_slack_G",
        "min_slack_H",
        "equality_deviation",
        "small_t_ratio",
        "extended_points",
        "t",
        "lhs",
        "rhs",
        "slack",
        "pass",
    ]

    def grid(self) -> LemmaGrid:
        c = self.config
        return LemmaGrid(t_min=c.t_min, t_max=c.t_max, count=c.points, spacing=c.spacing)

    def run(self) -> List[Dict[str, Any]]:
        grid = self.grid()
        precision = Precision.parse(self.config.precision)
        report = sweep_lemma(self.ctx, grid, None if precision is Precision.DOUBLE else precision)
        sweep = report.as_dict()
        sweep.pop("grid")
        sweep["failure_count"] = len(sweep.pop("failures"))
        items = [{"check": "lemma sweep", **sweep}]

        ts = np.geomspace(max(grid.t_min, 1e-3), grid.t_max, PHI_BOUND_POINTS)
        for result in check_phi_bounds(self.ctx, ts):
            items.append(self._check_item(result))

        if self.config.derivative_chain and self.ctx.n >= 3:
            for result in check_derivative_chain(self.ctx, DERIVATIVE_POINTS):
                items.append(self._check_item(result))
        return items

    @staticmethod
    def _check_item(result) -> Dict[str, Any]:
        record = result.as_dict()
        context = record.pop("context")
        return {"check": record.pop("name"), "t": context.get("t"), "n": context.get("n"), **record}

    def summarize(self, items: List[Dict[str, Any]]) -> Dict[str, Any]:
        sweep = items[0]
        checks = items[1:]
        summary = {
            "min_slack_F": sweep["min_slack_F"],
            "argmin_F": sweep["argmin_F"],
            "min_slack_G": sweep["min_slack_G"],
            "min_slack_H": sweep["min_slack_H"],
            "sweep_failures": sweep["failure_count"],
            "check_count": len(checks),
            "check_pass_count": sum(1 for item in checks if item["pass"]),
        }
        derivative = [item for item in checks if item["check"].startswith("derivative")]
        if derivative:
            summary["max_derivative_error"] = max(-item["slack"] for item in derivative)
        passed = sweep["pass"] and summary["check_pass_count"] == len(checks)
        if self.ctx.n == 2:
            summary["equality_deviation"] = sweep["equality_deviation"]
            passed = passed and sweep["equality_deviation"] <= EQUALITY_TOLERANCE
        summary["pass"] = passed
        return summary
