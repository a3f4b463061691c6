"""Tests for report sections, checks and rendering."""

import io
import json
from fractions import Fraction

from rich.console import Console

from src.gkz_core import assemble_system
from src.periods import EvaluationPoint
from src.report import (
    applicable_sections,
    cokernel_section,
    collect_report,
    display_checks,
    dumps_report,
    print_report_summary,
    report_error,
    run_checks,
    save_report,
)
from src.utils.config import RunSettings
from src.utils.errors import ValidationError

HALF = Fraction(-1, 2)


def capture_console():
    buffer = io.StringIO()
    return Console(file=buffer, width=160), buffer


class TestChecks:
    def test_example1_all_pass(self, example1):
        checks = run_checks(example1)
        assert [c.status for c in checks] == ["pass"] * 5

    def test_resonant_warning(self, example2):
        statuses = {c.name: c.status for c in run_checks(example2)}
        assert statuses["Non-resonance"] == "warning"
        assert statuses["Cone hypothesis"] == "pass"

    def test_hypothesis_failure(self):
        system = assemble_system(1, 1, [[[1], [2]]], [HALF])
        failed = [c for c in run_checks(system) if c.status == "fail"]
        assert [c.name for c in failed] == ["Cone hypothesis"]
        assert failed[0].recommendation

    def test_higher_dimension_warning(self):
        system = assemble_system(1, 2, [[[0, 0], [1, 0], [0, 1]]], [HALF])
        statuses = {c.name: c.status for c in run_checks(system)}
        assert statuses["Torus dimension"] == "warning"

    def test_display(self, example2):
        out, buffer = capture_console()
        display_checks(run_checks(example2), out=out)
        text = buffer.getvalue()
        assert "PASS" in text
        assert "WARNING" in text
        assert "1 warnings" in text


class TestCollectReport:
    def test_sections_without_point(self, example1):
        assert applicable_sections(example1, None) == [
            "validate",
            "operators",
            "volume",
            "toric",
            "rank",
        ]

    def test_sections_higher_dimension(self):
        system = assemble_system(1, 2, [[[0, 0], [1, 0], [0, 1]]], [HALF])
        assert applicable_sections(system, None) == ["validate", "operators", "volume"]
        report = collect_report(system, RunSettings())
        assert report["volume"]["volume"] == 1

    def test_keys(self, example3):
        report = collect_report(example3, RunSettings(), problem={"r": 1})
        assert list(report) == [
            "schema_version",
            "command",
            "problem",
            "system",
            "validate",
            "operators",
            "volume",
            "toric",
            "rank",
        ]
        assert report["system"]["volume"] == 4
        assert report["rank"]["rank"] == 4
        assert report["rank"]["agrees"] is True

    def test_with_point(self, example1):
        point = EvaluationPoint.from_system(example1, [[3, 1, 1]])
        report = collect_report(example1, RunSettings(), point=point)
        periods = report["periods"]
        assert periods["matrix_rank"] == periods["predicted_rank"] == 2
        assert len(periods["zeros"][0]) == 2

    def test_dumps(self, example1):
        report = collect_report(example1, RunSettings(degree_bound=2))
        text = dumps_report(report)
        assert text.endswith("}\n")
        assert json.loads(text) == json.loads(dumps_report(json.loads(text)))
        assert dumps_report({"value": Fraction(3, 4), "z": 1j}) == (
            '{\n  "value": "3/4",\n  "z": [\n    0.0,\n    1.0\n  ]\n}\n'
        )

    def test_save(self, tmp_path, example1):
        report = collect_report(example1, RunSettings(degree_bound=2))
        target = tmp_path / "nested" / "report.json"
        save_report(report, target)
        assert target.read_text(encoding="utf-8") == dumps_report(report)


class TestRendering:
    def test_summary(self, example2):
        out, buffer = capture_console()
        print_report_summary(collect_report(example2, RunSettings()), out=out)
        text = buffer.getvalue()
        assert "Normalized volume" in text
        assert "rho_inf" in text
        assert "LES dimensions" in text

    def test_error_line(self):
        out, buffer = capture_console()
        report_error(ValidationError("$.weights[0][1]", "bad"), out=out)
        assert "ValidationError" in buffer.getvalue()
        assert "$.weights[0][1]" in buffer.getvalue()


class TestCokernelSection:
    def test_default_target(self):
        section = cokernel_section(beta=HALF, g=Fraction(1))
        assert section["functional"] == "0"
        assert section["in_image"] is True
        assert section["trace"]["preimage"] == {"c": ["0", "1"], "d": ["1"]}
        assert "connection_residues" not in section

    def test_projection(self):
        section = cokernel_section(beta=HALF, g=Fraction(2), c=[Fraction(1)], d=[])
        assert section["functional"] == "1"
        assert section["in_image"] is False
        assert section["projected"] == {"c": [], "d": []}

    def test_residues(self):
        section = cokernel_section(
            beta=HALF, g=Fraction(1), dg=[Fraction(3, 2), Fraction(0)]
        )
        assert section["connection_residues"] == ["3/4", "0"]
