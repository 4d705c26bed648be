import io
import json
import math

import numpy as np
import pandas as pd
import pytest

from hypermt.precision import Precision
from hypermt.reporting import ReportWriter, RunReport, emit_report


@pytest.fixture
def report():
    return RunReport(
        command="psi-k",
        config={"n": 2, "precision": Precision.DOUBLE},
        version="0.1.0",
        items=[
            {"k": 2.0, "product": np.float64(2.5), "gap": math.inf},
            {"k": 5.0, "product": 3.5, "gap": 1e-3},
        ],
        summary={"pass": True, "max_gap": math.nan},
        passed=True,
        columns=["k", "product", "gap"],
        timings={"run_seconds": 0.25},
    )


class TestJson:
    def test_keys_are_sorted(self, report):
        text = emit_report(report, "json").decode("utf-8")
        data = json.loads(text)
        assert list(data) == sorted(data)
        assert text.endswith("}\n")
        assert data["pass"] is True

    def test_non_finite_becomes_null(self, report):
        data = json.loads(emit_report(report, "json"))
        assert data["items"][0]["gap"] is None
        assert data["summary"]["max_gap"] is None
        assert data["items"][0]["product"] == 2.5

    def test_enum_values(self, report):
        data = json.loads(emit_report(report, "json"))
        assert data["config"]["precision"] == "double"


class TestCsv:
    def test_one_row_per_item(self, report):
        text = emit_report(report, "csv").decode("utf-8")
        lines = text.strip().splitlines()
        assert len(lines) == len(report.items) + 1
        assert lines[0] == "k,product,gap"

    def test_full_precision(self, report):
        report.items[1]["product"] = 0.1 + 0.2
        frame = pd.read_csv(io.BytesIO(emit_report(report, "csv")), float_precision="round_trip")
        assert frame["product"][1] == 0.1 + 0.2
        assert math.isnan(frame["gap"][0])

    def test_empty_items(self, report):
        report.items = []
        text = emit_report(report, "csv").decode("utf-8")
        assert text.strip() == "k,product,gap"

    def test_unknown_format(self, report):
        with pytest.raises(ValueError):
            emit_report(report, "xml")


class TestReportWriter:
    def test_default_path(self, tmp_path, report):
        writer = ReportWriter({"directory": str(tmp_path / "out"), "format": "json"})
        path = writer.write(report)
        assert path == str(tmp_path / "out" / "psi-k-n2.json")
        with open(path, "rb") as f:
            assert f.read() == emit_report(report, "json")

    def test_explicit_path_and_format(self, tmp_path, report):
        writer = ReportWriter({"directory": str(tmp_path), "format": "json"})
        target = tmp_path / "custom.csv"
        writer.write(report, str(target), "csv")
        assert target.read_text().startswith("k,product,gap")

    def test_leaves_no_temporary_files(self, tmp_path, report):
        writer = ReportWriter({"directory": str(tmp_path), "format": "json"})
        writer.write(report)
        writer.write(report)
        assert [p.name for p in tmp_path.iterdir()] == ["psi-k-n2.json"]

    def test_unwritable_target(self, tmp_path, report):
        blocker = tmp_path / "file"
        blocker.write_text("")
        writer = ReportWriter({"directory": str(blocker / "sub"), "format": "json"})
        with pytest.raises(OSError):
            writer.write(report)
