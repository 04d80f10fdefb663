"""Tests for the command-line front end."""

import argparse
import io
import json
import math

import numpy as np
import pytest

from src.algorithms.edge_fit import synthetic_ratio
from src.cli.app import build_parser, join_negative_values, run
from src.cli.complex_literal import format_complex, parse_complex, parse_orders
from src.cli.output import OutputRecord, render, to_jsonable, write_curve_csv
from src.models.casimir_config import PFA_COEFFICIENT, BoundaryCondition, EnergyCurve, EnergyRecord
from src.models.errors import DomainError


def _run(*argv):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


def _write_synthetic_curve(path, beta=0.00092, gamma=-0.0040):
    curve = EnergyCurve(d=1.0, bc=BoundaryCondition.ELECTROMAGNETIC)
    for aspect in np.linspace(9.9, 2.1, 12):
        H = 2.0 / aspect
        ratio = synthetic_ratio(H, 1.0, beta, gamma)
        curve.add(EnergyRecord(H, ratio * -PFA_COEFFICIENT * 2.0 / H**3, ratio, 0.0, 12))
    with open(path, "w", encoding="utf-8") as handle:
        write_curve_csv(curve, handle)


class TestComplexLiteral:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("1.5", 1.5 + 0j),
            ("-2", -2 + 0j),
            ("0.25+1.5i", 0.25 + 1.5j),
            ("3-0.5i", 3 - 0.5j),
            ("1+i", 1 + 1j),
            ("1e-3", 0.001 + 0j),
        ],
    )
    def test_parse(self, text, expected):
        assert parse_complex(text) == expected

    @pytest.mark.parametrize("text", ["1+", "i", "1.5j", "1 + 2i", "abc", ""])
    def test_malformed(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_complex(text)

    def test_orders(self):
        assert parse_orders("0..3") == [0, 1, 2, 3]
        assert parse_orders("1,4,2") == [1, 4, 2]
        with pytest.raises(argparse.ArgumentTypeError):
            parse_orders("3..1")

    def test_format(self):
        assert format_complex(0.5 + 0j) == "0.5"
        assert format_complex(0.5 - 2j) == "0.5 -2.0"


class TestOutput:
    def test_jsonable_complex(self):
        assert to_jsonable({"q": 1 + 2j, "v": np.array([1.0, 2.0])}) == {"q": {"re": 1.0, "im": 2.0}, "v": [1.0, 2.0]}

    def test_unknown_format(self):
        with pytest.raises(DomainError):
            render(OutputRecord(command="x", inputs={}, payload={}), "yaml")

    def test_default_text_rendering(self):
        record = OutputRecord(command="x", inputs={}, payload={"b": 2.0, "a": "y"})
        assert render(record, "text") == "a = y\nb = 2.0\n"

    def test_payload_csv(self):
        record = OutputRecord(command="x", inputs={}, payload={"b": 2.0, "a": 1 + 1j})
        assert render(record, "csv") == "a,b\n1.0 1.0,2.0\n"


class TestEval:
    def test_ce0_at_zero_parameter(self):
        code, out, _ = _run("eval", "--function", "ce", "--order", "0", "--q", "0", "--arg", "1.0")
        assert code == 0
        assert out == "0.7071067811865476\n"

    def test_characteristic_value(self):
        code, out, _ = _run("eval", "--function", "charval", "--order", "1", "--q", "1")
        assert code == 0
        assert float(out) == pytest.approx(1.85910807, abs=1e-8)

    def test_json_is_deterministic(self):
        argv = ("--format", "json", "eval", "--function", "se", "--order", "2", "--q", "1+0.5i", "--arg", "0.3")
        first, second = _run(*argv), _run(*argv)
        assert first == second
        data = json.loads(first[1])
        assert data["schema_version"] == 1
        assert data["command"] == "eval"
        assert data["inputs"]["q"] == {"re": 1.0, "im": 0.5}
        assert set(data["payload"]["value"]) == {"re", "im"}
        assert "derivative" not in data["payload"]

    def test_csv_row(self):
        code, out, _ = _run("--format", "csv", "eval", "--function", "je", "--order", "1", "--q", "2", "--arg", "0.5")
        assert code == 0
        header, row = out.strip().splitlines()
        assert header == "value_re,value_im"
        assert len(row.split(",")) == 2

    def test_csv_row_with_derivative(self):
        argv = ("eval", "--function", "je", "--order", "1", "--q", "2", "--arg", "0.5", "--derivative")
        code, out, _ = _run("--format", "csv", *argv)
        assert code == 0
        header, row = out.strip().splitlines()
        assert header == "value_re,value_im,derivative_re,derivative_im"
        assert len(row.split(",")) == 4

    def test_derivative_line(self):
        code, out, _ = _run("eval", "--function", "ce", "--order", "1", "--q", "0", "--arg", "1.0", "--derivative")
        assert code == 0
        value, derivative = out.strip().splitlines()
        assert float(value.split()[0]) == pytest.approx(math.cos(1.0), abs=1e-10)
        assert float(derivative.split()[0]) == pytest.approx(-math.sin(1.0), abs=1e-10)

    def test_derivative_json_object(self):
        argv = ("eval", "--function", "ye", "--order", "0", "--q", "1", "--arg", "0.4", "--derivative")
        code, out, _ = _run("--format", "json", *argv)
        assert code == 0
        derivative = json.loads(out)["payload"]["derivative"]
        assert set(derivative) == {"re", "im"}

    def test_negative_parameter_value(self):
        spaced = _run("eval", "--function", "ce", "--order", "1", "--q", "-1+0.5i", "--arg", "0.3")
        joined = _run("eval", "--function", "ce", "--order", "1", "--q=-1+0.5i", "--arg", "0.3")
        assert spaced[0] == 0
        assert spaced == joined

    def test_negative_argument_value(self):
        code, out, _ = _run("eval", "--function", "ce", "--order", "0", "--q", "0", "--arg", "-0.5")
        assert code == 0
        assert float(out) == pytest.approx(math.sqrt(0.5), abs=1e-12)

    def test_format_after_subcommand(self):
        code, out, _ = _run("eval", "--function", "ce", "--order", "0", "--q", "1", "--arg", "0.2", "--format", "json")
        assert code == 0
        assert json.loads(out)["command"] == "eval"

    def test_malformed_complex_is_usage_error(self):
        code, _, _ = _run("eval", "--function", "ce", "--order", "0", "--q", "1+", "--arg", "0")
        assert code == 2

    def test_invalid_order_is_domain_error(self):
        code, out, err = _run("eval", "--function", "jo", "--order", "0", "--q", "1", "--arg", "0.5")
        assert code == 1
        assert out == ""
        assert err.startswith("error: DomainError:")

    def test_missing_argument(self):
        code, _, err = _run("eval", "--function", "ce", "--order", "0", "--q", "1")
        assert code == 1
        assert "DomainError" in err


class TestTable:
    def test_charval_orders(self):
        code, out, _ = _run("table", "--kind", "charval", "--orders", "0..2", "--q", "1")
        assert code == 0
        lines = out.strip().splitlines()
        assert [line.split()[0] for line in lines] == ["0", "1", "2"]

    def test_coefficients_json(self):
        code, out, _ = _run("--format", "json", "table", "--kind", "coeffs", "--order", "2", "--q", "3")
        assert code == 0
        data = json.loads(out)
        assert data["payload"]["orders"][:3] == [0, 2, 4]
        assert data["diagnostics"]["tail_ratio"] <= 1e-14

    def test_second_kind(self):
        code, out, _ = _run("table", "--kind", "second", "--parity", "odd", "--order", "1", "--q", "1")
        assert code == 0
        assert out.strip()


class TestCheck:
    def test_wronskian_suite_passes(self):
        code, out, _ = _run("check", "--suite", "wronskian", "--orders", "0..6", "--q", "1.0")
        assert code == 0
        assert out.strip().splitlines()[-1].startswith("PASS")

    @pytest.mark.parametrize("q", ["-3", "-3+2i"])
    def test_wronskian_suite_passes_for_growing_solutions(self, q):
        code, out, _ = _run("check", "--suite", "wronskian", "--orders", "0..3", "--q", q)
        assert code == 0, out

    def test_json_results(self):
        code, out, _ = _run("--format", "json", "check", "--suite", "normalization", "--orders", "0..2", "--q", "-1")
        assert code == 0
        data = json.loads(out)
        assert data["payload"]["passed"] is True
        assert len(data["payload"]["results"]) == 5

    def test_unknown_suite_is_usage_error(self):
        code, _, _ = _run("check", "--suite", "everything", "--q", "1")
        assert code == 2


class TestCasimirCommands:
    def test_geometry_error(self):
        code, _, err = _run("casimir", "--d", "1", "--H", "0.5", "--mu0", "1.0")
        assert code == 1
        assert "DomainError" in err

    def test_inverted_height_range(self):
        code, _, err = _run("curve", "--d", "1", "--H-min", "2", "--H-max", "1")
        assert code == 1
        assert "DomainError" in err

    def test_nonpositive_width_is_usage_error(self):
        code, _, _ = _run("casimir", "--d", "0", "--H", "1")
        assert code == 2

    @pytest.mark.slow
    def test_single_height(self):
        code, out, _ = _run("casimir", "--d", "1", "--H", "2", "--rmax", "4")
        assert code == 0
        data = json.loads(out)
        assert data["payload"]["energy_per_length"] < 0
        assert data["payload"]["r_max_used"] == 4


class TestFit:
    def test_fit_synthetic_file(self, tmp_path):
        path = tmp_path / "curve.csv"
        _write_synthetic_curve(path)
        code, out, _ = _run("fit", "--in", str(path))
        assert code == 0
        data = json.loads(out)
        assert data["payload"]["beta"] == pytest.approx(0.00092, abs=1e-10)
        assert data["payload"]["gamma"] == pytest.approx(-0.0040, abs=1e-10)
        assert data["inputs"]["d"] == 1.0
        assert data["diagnostics"]["n_points"] == 12

    def test_fit_from_stdin(self, tmp_path, monkeypatch):
        path = tmp_path / "curve.csv"
        _write_synthetic_curve(path)
        monkeypatch.setattr("sys.stdin", io.StringIO(path.read_text(encoding="utf-8")))
        code, out, _ = _run("fit", "--in", "-", "--fixed-intercept")
        assert code == 0
        assert json.loads(out)["payload"]["intercept"] == 1.0

    def test_missing_file(self, tmp_path):
        code, _, err = _run("fit", "--in", str(tmp_path / "absent.csv"))
        assert code == 1
        assert err.startswith("error: FileNotFoundError:")

    def test_too_narrow_range(self, tmp_path):
        path = tmp_path / "curve.csv"
        _write_synthetic_curve(path)
        code, _, err = _run("fit", "--in", str(path), "--fit-min", "2", "--fit-max", "3")
        assert code == 1
        assert "FitError" in err


class TestParser:
    def test_default_format_unset(self):
        args = build_parser().parse_args(["check", "--q", "1"])
        assert args.format is None
        assert args.orders == [0, 1, 2, 3, 4]
        assert args.suite == "all"

    def test_shared_options_on_either_side(self):
        parser = build_parser()
        before = parser.parse_args(["--format", "csv", "--threads", "3", "check", "--q", "1"])
        after = parser.parse_args(["check", "--q", "1", "--format", "csv", "--threads", "3", "-v"])
        assert (before.format, before.threads, before.verbose) == ("csv", 3, 0)
        assert (after.format, after.threads, after.verbose) == ("csv", 3, 1)

    def test_join_negative_values(self):
        argv = ["eval", "--q", "-2.5-1i", "--arg", "0.3", "--order", "1"]
        assert join_negative_values(argv) == ["eval", "--q=-2.5-1i", "--arg", "0.3", "--order", "1"]
        assert join_negative_values(["--q", "-v"]) == ["--q", "-v"]
        assert join_negative_values(["--q"]) == ["--q"]

    def test_missing_command(self):
        code, _, _ = _run()
        assert code == 2
