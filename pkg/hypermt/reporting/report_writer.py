import enum
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..config import OUTPUT_CONFIG

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")


@dataclass
class RunReport:
    command: str
    config: Dict[str, Any]
    version: str
    items: List[Dict[str, Any]]
    summary: Dict[str, Any]
    passed: bool
    columns: List[str] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "items": self.items,
            "summary": self.summary,
            "pass": self.passed,
            "timings": self.timings,
        }


def _clean(value: Any) -> Any:
    """JSON-safe copy: numpy scalars unwrapped, non-finite reals become None"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_clean(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, enum.Enum):
        return value.value
    return value


def emit_report(report: RunReport, fmt: str = "json") -> bytes:
    """Serialize a report; JSON keys are sorted, CSV carries one row per item"""
    if fmt == "json":
        text = json.dumps(_clean(report.as_dict()), sort_keys=True, indent=2, allow_nan=False)
        return (text + "\n").encode("utf-8")
    if fmt == "csv":
        items = _clean(report.items)
        frame = pd.json_normalize(items) if items else pd.DataFrame()
        columns = report.columns or sorted(frame.columns)
        frame = frame.reindex(columns=columns)
        text = frame.to_csv(index=False, float_format=OUTPUT_CONFIG["float_format"], na_rep="")
        return text.encode("utf-8")
    raise ValueError(f"Unsupported report format: {fmt}")


class ReportWriter:
    def __init__(self, output_config: Optional[Dict[str, Any]] = None):
        self.output_config = output_config or OUTPUT_CONFIG

    def default_path(self, report: RunReport, fmt: str) -> str:
        n = report.config.get("n")
        return os.path.join(self.output_config["directory"], f"{report.command}-n{n}.{fmt}")

    def write(self, report: RunReport, path: Optional[str] = None, fmt: Optional[str] = None) -> str:
        """Write the report atomically: temp file in the target directory, then rename"""
        fmt = fmt or self.output_config["format"]
        path = path or self.default_path(report, fmt)
        payload = emit_report(report, fmt)
        directory = os.path.dirname(os.path.abspath(path))
        tmp_path = None
        try:
            os.makedirs(directory, exist_ok=True)
            with tempfile.NamedTemporaryFile(
                "wb", dir=directory, prefix=".report-", suffix=".tmp", delete=False
            ) as tmp:
                tmp_path = tmp.name
                tmp.write(payload)
                tmp.flush()
                os.fsync(tmp.fileno())
            os.replace(tmp_path, path)
        except OSError as e:
            logger.error(f"Error writing report to {path}: {e}")
            if tmp_path is not None and os.path.exists(tmp_path):
                os.unlink(tmp_path)
            raise
        logger.info(f"Report written to {path} ({len(payload)} bytes)")
        return path
