"""
Tests for the command-line surface and its JSON reports.
"""
import json

import pytest

from app.main import main, render_report, run
from app.models.reports import CheckStatus
from app.utils.error_handling import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_OK
from tests.conftest import M0_TEXT, TWINS_TEXT
from tests.test_interpretation import LADDER
from tests.test_metric_checks import BAD_TRIANGLE

FLAT_TEXT = """
(structure
  (vocabulary (predicate P 1))
  (universe a b)
  (predicate P (a 1/4) (b 1/4)))
"""

GAPPED_INTERPRETATION = """
(interpretation (grid 2) (predicate P 1)
  (lower P 0 (L1 x1)) (lower P 1/2 (L1 x1))
  (upper P 1/2 (H1 x1)) (upper P 1 (H2 x1)))
"""


class TestCommands:
    """Each command dispatched through run()."""

    def _file(self, tmp_path, name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    def test_eval(self, tmp_path):
        m0 = self._file(tmp_path, "m0.cl", M0_TEXT)
        code, report = run(["eval", "--structure", m0, "--formula", "(sup x (P x))"])
        assert code == EXIT_OK
        assert report.status == CheckStatus.PASS
        assert report.values["value"] == "3/4"

    def test_eval_with_assignment(self, tmp_path):
        m0 = self._file(tmp_path, "m0.cl", M0_TEXT)
        code, report = run(["eval", "--structure", m0, "--formula", "(P x)", "--assign", "x=a"])
        assert code == EXIT_OK
        assert report.values["value"] == "1/4"

    def test_reduce(self, tmp_path):
        twins = self._file(tmp_path, "twins.cl", TWINS_TEXT)
        code, report = run(["reduce", "--structure", twins])
        assert code == EXIT_OK
        assert report.values["blocks"] == [["a"], ["b", "c"]]
        assert report.values["quotient_map"]["b"] == report.values["quotient_map"]["c"]

    def test_distinguish(self, tmp_path):
        m0 = self._file(tmp_path, "m0.cl", M0_TEXT)
        flat = self._file(tmp_path, "flat.cl", FLAT_TEXT)
        code, report = run(["distinguish", "--structure", m0, "--structure", flat])
        assert code == EXIT_OK
        assert report.values["distinguished"] is True
        assert report.witnesses[0]["gap"] != "0"

    def test_expand(self, tmp_path):
        m0 = self._file(tmp_path, "m0.cl", M0_TEXT)
        code, report = run(["expand", "--structure", m0])
        assert code == EXIT_OK
        assert "(predicate D 2)" in report.values["expanded_vocabulary"]
        assert report.values["signature"] == {"P": "1"}

    def test_metric_check_finds_triangle(self, tmp_path):
        bad = self._file(tmp_path, "bad.cl", BAD_TRIANGLE)
        code, report = run(["metric-check", "--structure", bad, "--distance", "d"])
        assert code == EXIT_CHECK_FAILED
        assert report.status == CheckStatus.FAIL
        assert report.witnesses[0]["axiom"] == "triangle"
        assert report.witnesses[0]["elements"] == ["a", "b", "c"]

    def test_metric_check_synthesized(self, tmp_path):
        twins = self._file(tmp_path, "twins.cl", TWINS_TEXT)
        code, report = run(["metric-check", "--structure", twins, "--grid", "4"])
        assert code == EXIT_OK
        assert report.witnesses == []

    def test_metric_check_given_distance_runs_every_check(self, tmp_path):
        m0 = self._file(tmp_path, "m0.cl", M0_TEXT)
        code, report = run([
            "metric-check", "--structure", m0, "--distance", "(absdiff (P x) (P y))",
            "--modulus", "P=1", "--grid", "8",
        ])
        assert code == EXIT_OK
        assert report.values["pseudometric"]["status"] == "pass"
        assert report.values["moduli"]["P"]["status"] == "pass"
        assert report.values["met_axioms"]["holds"] is True
        assert report.values["signature"] == {"P": "1"}

    def test_metric_check_given_distance_with_too_small_modulus(self, tmp_path):
        m0 = self._file(tmp_path, "m0.cl", M0_TEXT)
        code, report = run([
            "metric-check", "--structure", m0, "--distance", "(absdiff (P x) (P y))",
            "--modulus", "P=1/2", "--grid", "8",
        ])
        assert code == EXIT_CHECK_FAILED
        assert report.witnesses[0]["predicate"] == "P"
        assert report.witnesses[0]["bound"] == "3/8"
        assert report.values["met_axioms"]["holds"] is False

    def test_force_converge_with_first_step(self, tmp_path):
        m0 = self._file(tmp_path, "m0.cl", M0_TEXT)
        seq = self._file(tmp_path, "jump.cl", "(sequence (frame x) (schedule exponential) 0 1)")
        code, report = run(["force-converge", "--structure", m0, "--sequence", seq, "--schedule", "1/4"])
        assert code == EXIT_OK
        assert "(schedule 1/4)" in report.values["sequence"]
        assert report.values["cauchy"]["status"] == "pass"

    def test_interpret_upgrade_gap(self, tmp_path):
        ladder = self._file(tmp_path, "ladder.cl", LADDER)
        interp = self._file(tmp_path, "gap.cl", GAPPED_INTERPRETATION)
        code, report = run(["interpret-upgrade", "--structure", ladder, "--interpretation", interp])
        assert code == EXIT_CHECK_FAILED
        assert report.witnesses[0]["elements"] == ["b"]


class TestInputErrors:
    """Input problems exit with 2 and still produce a report."""

    def test_unknown_flag(self):
        code, report = run(["eval", "--no-such-flag"])
        assert code == EXIT_INPUT_ERROR
        assert report.status == CheckStatus.ERROR
        assert report.values["code"] == "usage-error"

    def test_missing_file(self, tmp_path):
        code, report = run(["reduce", "--structure", str(tmp_path / "missing.cl")])
        assert code == EXIT_INPUT_ERROR
        assert report.values["code"] == "usage-error"

    def test_parse_error_has_position(self, tmp_path):
        path = tmp_path / "broken.cl"
        path.write_text("(structure (vocabulary (predicate P 1))\n  (universe a)\n  (predicate P (a 2)))", encoding="utf-8")
        code, report = run(["reduce", "--structure", str(path)])
        assert code == EXIT_INPUT_ERROR
        assert report.values["code"] == "value-out-of-range"
        assert report.values["details"]["line"] == 3

    @pytest.mark.parametrize("tolerance", ["abc", "1/0", "3/2"])
    def test_bad_tolerance(self, tmp_path, tolerance):
        structure = tmp_path / "m0.cl"
        structure.write_text(M0_TEXT, encoding="utf-8")
        theory = tmp_path / "theory.cl"
        theory.write_text("(theory (inf x (P x)))", encoding="utf-8")
        code, report = run([
            "check-model", "--structure", str(structure), "--theory", str(theory), "--tolerance", tolerance,
        ])
        assert code == EXIT_INPUT_ERROR
        assert report.status == CheckStatus.ERROR
        assert report.values["code"] == "usage-error"
        assert report.values["details"]["option"] == "--tolerance"

    def test_tolerance_is_applied(self, tmp_path):
        structure = tmp_path / "m0.cl"
        structure.write_text(M0_TEXT, encoding="utf-8")
        theory = tmp_path / "theory.cl"
        theory.write_text("(theory (inf x (P x)))", encoding="utf-8")
        argv = ["check-model", "--structure", str(structure), "--theory", str(theory)]
        assert run(argv)[0] == EXIT_CHECK_FAILED
        assert run(argv + ["--tolerance", "1/4"])[0] == EXIT_OK

    @pytest.mark.parametrize("extra", [
        ["--distance", "(absdiff (P x) (P y))", "--modulus", "Q=1"],
        ["--distance", "(absdiff (P x) (P y))", "--modulus", "P=abc"],
        ["--distance", "(absdiff (P x) (P y))", "--modulus", "P=0"],
        ["--modulus", "P=1"],
    ])
    def test_bad_modulus(self, tmp_path, extra):
        structure = tmp_path / "m0.cl"
        structure.write_text(M0_TEXT, encoding="utf-8")
        code, report = run(["metric-check", "--structure", str(structure)] + extra)
        assert code == EXIT_INPUT_ERROR
        assert report.values["code"] == "usage-error"

    def test_modulus_rejected_for_random_sweep(self, tmp_path):
        vocab = tmp_path / "vocab.cl"
        vocab.write_text("(vocabulary (predicate P 1))", encoding="utf-8")
        code, report = run(["metric-check", "--vocab", str(vocab), "--modulus", "P=1", "--samples", "2"])
        assert code == EXIT_INPUT_ERROR
        assert report.values["code"] == "usage-error"

    def test_grid_must_be_power_of_two(self, tmp_path):
        path = tmp_path / "m0.cl"
        path.write_text(M0_TEXT, encoding="utf-8")
        code, report = run(["metric-check", "--structure", str(path), "--grid", "3"])
        assert code == EXIT_INPUT_ERROR


class TestReportOutput:
    """Rendering and the --json copy."""

    def test_schema_key(self):
        _, report = run(["eval", "--no-such-flag"])
        document = json.loads(render_report(report))
        assert "schema" in document
        assert "schema_version" not in document
        assert document["command"] == "eval"

    def test_json_copy(self, tmp_path, capsys):
        structure = tmp_path / "m0.cl"
        structure.write_text(M0_TEXT, encoding="utf-8")
        target = tmp_path / "report.json"
        code = main(["eval", "--structure", str(structure), "--formula", "(inf x (P x))", "--json", str(target)])
        assert code == EXIT_OK
        printed = json.loads(capsys.readouterr().out)
        assert json.loads(target.read_text(encoding="utf-8")) == printed
        assert printed["values"]["value"] == "1/4"
