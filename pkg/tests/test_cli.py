"""cli: thin client over the service handlers."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from mvirm.cli import main

from test_dsl import F2_TEXT

BINARY_TEXT = (
    "var x1: radix 2 encode(x1);\n"
    "var x2: radix 2 encode(x2);\n"
    "var x3: radix 2 encode(x3);\n"
    "out f = x1 * x2 * x3 ^ !x1 * !x2 * !x3;\n"
)


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def f2_file(tmp_path):
    p = tmp_path / "f2.mvi"
    p.write_text(F2_TEXT)
    return str(p)


class TestSynth:
    def test_report(self, runner, f2_file):
        result = runner.invoke(main, ["synth", "--in", f2_file])
        assert result.exit_code == 0, result.output
        assert "maslov=8" in result.output
        assert "verified=true" in result.output

    def test_emits_files(self, runner, f2_file, tmp_path):
        out = tmp_path / "artifacts"
        out.mkdir()
        result = runner.invoke(
            main,
            [
                "synth", "--in", f2_file,
                "--emit", "netlist", "--emit", "qasm",
                "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        netlist = out / "F2.netlist.json"
        qasm = out / "F2.qasm"
        assert netlist.exists() and qasm.exists()
        assert json.loads(netlist.read_text())["format"] == "mvirm-netlist"
        assert qasm.read_text().startswith("OPENQASM 2.0;")

    def test_search_ranked_files(self, runner, f2_file, tmp_path):
        result = runner.invoke(
            main,
            [
                "synth", "--in", f2_file, "--search", "sample:5", "--seed", "1",
                "--top", "2", "--emit", "netlist", "--out", str(tmp_path),
            ],
        )
        assert result.exit_code == 0, result.output
        assert (tmp_path / "F2.rank0.netlist.json").exists()
        assert (tmp_path / "F2.rank1.netlist.json").exists()

    def test_esop_target(self, runner, tmp_path):
        p = tmp_path / "f.mvi"
        p.write_text(BINARY_TEXT)
        result = runner.invoke(
            main, ["synth", "--in", str(p), "--target", "esop"]
        )
        assert result.exit_code == 0, result.output
        assert "maslov=29" in result.output
        assert "tqc=221" in result.output

    def test_contract_error_exit_2(self, runner, tmp_path):
        p = tmp_path / "f.mvi"
        p.write_text("var x: radix 2 encode(x);\nout f = x;\n")
        result = runner.invoke(main, ["synth", "--in", str(p)])
        assert result.exit_code == 2
        assert "error:" in result.output


class TestTransform:
    def test_coefficients(self, runner, f2_file):
        result = runner.invoke(main, ["transform", "--in", f2_file])
        assert result.exit_code == 0, result.output
        assert "variables=X1,X2" in result.output
        assert "coefficient=(1,1) outputs=F2" in result.output
        assert result.output.count("coefficient=") == 4

    def test_methods_agree(self, runner, f2_file):
        a = runner.invoke(main, ["transform", "--in", f2_file])
        b = runner.invoke(
            main, ["transform", "--in", f2_file, "--method", "products-matching"]
        )
        assert a.output == b.output

    def test_polarity_in_separate_file(self, runner, tmp_path):
        func = tmp_path / "f.mvi"
        func.write_text(
            "".join(
                line + "\n"
                for line in F2_TEXT.splitlines()
                if not line.startswith("polarity")
            )
        )
        pol = tmp_path / "p.mvi"
        pol.write_text(
            "polarity X1 = [1111;0101;0011;0111];\n"
            "polarity X2 = [111;100;001];\n"
        )
        result = runner.invoke(
            main, ["transform", "--in", str(func), "--polarity", str(pol)]
        )
        assert result.exit_code == 0, result.output
        assert result.output.count("coefficient=") == 4


class TestCostVerify:
    def test_cost_and_verify(self, runner, f2_file, tmp_path):
        runner.invoke(
            main,
            ["synth", "--in", f2_file, "--emit", "netlist", "--out", str(tmp_path)],
        )
        netlist = str(tmp_path / "F2.netlist.json")
        cost = runner.invoke(main, ["cost", "--in", netlist])
        assert cost.exit_code == 0
        assert "maslov=8" in cost.output
        verify = runner.invoke(
            main, ["verify", "--in", f2_file, "--netlist", netlist]
        )
        assert verify.exit_code == 0
        assert "equivalent=true" in verify.output

    def test_verify_mismatch_exit_1(self, runner, f2_file, tmp_path):
        runner.invoke(
            main,
            ["synth", "--in", f2_file, "--emit", "netlist", "--out", str(tmp_path)],
        )
        wrong = tmp_path / "wrong.mvi"
        wrong.write_text(F2_TEXT.replace("X1{0} * X2{2}", "X1{1} * X2{2}"))
        result = runner.invoke(
            main,
            [
                "verify", "--in", str(wrong),
                "--netlist", str(tmp_path / "F2.netlist.json"),
            ],
        )
        assert result.exit_code == 1
        assert "equivalent=false" in result.output
        assert "counterexample=" in result.output


class TestEnumerate:
    def test_polarities(self, runner):
        result = runner.invoke(
            main, ["enumerate", "polarities", "--radix", "3", "--full-polarities"]
        )
        assert result.exit_code == 0
        assert "count=28" in result.output

    def test_pairings(self, runner):
        result = runner.invoke(
            main,
            ["enumerate", "pairings", "--vars", "a,b,c,d", "--max-group", "2"],
        )
        assert result.exit_code == 0
        assert "count=10" in result.output
        assert "a,b|c,d" in result.output

    def test_limit(self, runner):
        result = runner.invoke(
            main, ["enumerate", "polarities", "--radix", "4", "--limit", "3"]
        )
        assert "count=224" in result.output
        assert result.output.count("\n") == 4  # count line + 3 items
