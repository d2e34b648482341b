"""CLI surface: verify subcommand, compute subcommands, figures output."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from c2hom import codec
from c2hom.cli import main
from c2hom.homalg import complex_from_functor, sigma_shift
from c2hom.mackey import constant_unit
from c2hom.zlin import BaseRing


@pytest.fixture
def runner():
    return CliRunner()


class TestVerify:
    def test_list(self, runner):
        result = runner.invoke(main, ["verify", "--list"])
        assert result.exit_code == 0
        assert "perfectoid" in result.output
        assert "hkr-poly" in result.output

    def test_requires_case(self, runner):
        result = runner.invoke(main, ["verify"])
        assert result.exit_code == 2

    def test_unknown_case(self, runner):
        result = runner.invoke(main, ["verify", "--case", "nope"])
        assert result.exit_code == 2

    def test_bad_ring(self, runner):
        result = runner.invoke(main, ["verify", "--case", "box-unit",
                                      "--ring", "q7"])
        assert result.exit_code == 2

    def test_box_unit_table(self, runner):
        result = runner.invoke(main, ["verify", "--case", "box-unit",
                                      "--ring", "z"])
        assert result.exit_code == 0
        assert "[pass] box-unit" in result.output

    def test_sigma_shift_odd_prime_f5(self, runner):
        result = runner.invoke(main, ["verify", "--case",
                                      "sigma-shift-odd-prime", "--ring", "f5",
                                      "--format", "json"])
        assert result.exit_code == 0
        obj = json.loads(result.output)
        assert obj["pass"] is True
        h1 = obj["cases"]["sigma-shift-odd-prime"]["computed"]["H1"]
        assert h1["mfix"]["gens"] == 0  # sign fixed-point: nothing fixed

    def test_json_report_deterministic(self, runner):
        args = ["verify", "--case", "green-laws", "--format", "json"]
        a = runner.invoke(main, args).output
        b = runner.invoke(main, args).output
        assert a == b

    def test_perfectoid_small_with_figures(self, runner, tmp_path):
        figs = tmp_path / "figs"
        result = runner.invoke(main, [
            "verify", "--case", "perfectoid", "--ring", "f3", "--nmax", "2",
            "--window", "-1..5", "--figures", str(figs),
        ])
        assert result.exit_code == 0, result.output
        pngs = list(figs.glob("*.png"))
        csvs = list(figs.glob("*.csv"))
        assert pngs and csvs
        header = csvs[0].read_text().splitlines()[0]
        assert header.startswith("n,")

    def test_window_parse_error(self, runner):
        result = runner.invoke(main, ["verify", "--case", "perfectoid",
                                      "--window", "oops"])
        assert result.exit_code == 2

    def test_failing_golden_sets_exit_one(self, runner, monkeypatch):
        import c2hom.cli as climod
        monkeypatch.setattr(climod, "_golden_payload",
                            lambda *a, **k: {"not": "matching"})
        result = runner.invoke(main, ["verify", "--case", "box-unit"])
        assert result.exit_code == 1
        assert "golden" in result.output


def mackey_json(m):
    return json.loads(codec.dumps(m))


class TestCompute:
    def test_box_from_stdin(self, runner):
        c = constant_unit(BaseRing.Z())
        payload = json.dumps({"a": mackey_json(c), "b": mackey_json(c)})
        result = runner.invoke(main, ["compute", "box", "--in", "-"],
                               input=payload)
        assert result.exit_code == 0, result.output
        out = json.loads(result.output)
        assert out["res"] == [[1]] and out["tr"] == [[2]]

    def test_homology_of_sigma_shift(self, runner, tmp_path):
        c = sigma_shift(complex_from_functor(constant_unit(BaseRing.Zmod(3))), 1)
        payload = {"complex": json.loads(codec.dumps(c)), "m": 1, "nsigma": 0}
        path = tmp_path / "in.json"
        path.write_text(json.dumps(payload))
        result = runner.invoke(main, ["compute", "homology", "--in", str(path)])
        assert result.exit_code == 0, result.output
        out = json.loads(result.output)
        assert out["mfix"]["gens"] == 0  # sign fixed-point functor
        assert out["me"]["gens"] == 1

    def test_rho_table(self, runner):
        c = complex_from_functor(constant_unit(BaseRing.Zmod(3)))
        payload = json.dumps({"complex": json.loads(codec.dumps(c)),
                              "range": [0, 2]})
        result = runner.invoke(main, ["compute", "rho", "--in", "-"],
                               input=payload)
        assert result.exit_code == 0, result.output
        out = json.loads(result.output)
        assert out["even"] is True and out["very_even"] is True
        assert out["rho"]["0"]["me"]["gens"] == 1

    def test_malformed_input_exit_two(self, runner):
        result = runner.invoke(main, ["compute", "box", "--in", "-"],
                               input="{nope")
        assert result.exit_code == 2

    def test_schema_error_exit_two(self, runner):
        result = runner.invoke(main, ["compute", "box", "--in", "-"],
                               input='{"a": {}, "b": {}}')
        assert result.exit_code == 2
