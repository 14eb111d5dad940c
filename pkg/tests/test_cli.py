import json
import math

import numpy as np
import pytest

from qspline.cli import dumps, main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture
def triangle_csv(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("x,y\n0,0\n1,1\n2,0\n")
    return path


class TestDumps:
    def test_seventeen_digits(self):
        assert dumps(0.1) == "0.10000000000000001"
        assert json.loads(dumps(1 / 3)) == 1 / 3

    def test_integral_float(self):
        assert dumps(8.0) == "8.0" and dumps(8) == "8"

    def test_nested(self):
        obj = {"a": [1.5, np.float64(2.0), {"b": None, "c": True}], "d": np.arange(2)}
        assert json.loads(dumps(obj)) == {"a": [1.5, 2.0, {"b": None, "c": True}], "d": [0, 1]}


class TestSubcommands:
    def test_fit_and_eval(self, capsys, tmp_path, triangle_csv):
        out = tmp_path / "fit.json"
        code, _ = run(capsys, "fit", "--input", str(triangle_csv), "--boundary", "natural",
                      "--phase-bits", "8", "--out", str(out))
        assert code == 0 and out.exists()
        code, text = run(capsys, "eval", "--fit", str(out), "--at", "0.5")
        res = json.loads(text)
        assert code == 0 and abs(res["S"] - 0.6875) <= 0.02
        assert set(res) >= {"S", "S1", "S2", "error_budget"}

    def test_eval_outside_range(self, capsys, tmp_path, triangle_csv):
        out = tmp_path / "fit.json"
        run(capsys, "fit", "--input", str(triangle_csv), "--estimator", "exact", "--out", str(out))
        assert main(["eval", "--fit", str(out), "--at", "5"]) == 2

    def test_type1_needs_values(self, triangle_csv):
        with pytest.raises(SystemExit):
            main(["fit", "--input", str(triangle_csv), "--boundary", "type1"])

    def test_qpe_demo(self, capsys):
        code, text = run(capsys, "qpe-demo", "--theta", "0.333333", "--bits", "3")
        res = json.loads(text)
        assert code == 0 and res["most_likely"] == 3
        assert res["two_candidate_mass"] >= 4 / math.pi**2
        assert len(res["outcomes"]) == 8

    def test_qpe_demo_text(self, capsys):
        code, text = run(capsys, "qpe-demo", "--theta", "0.375", "--bits", "3", "--format", "text")
        assert code == 0 and "most likely y = 3" in text

    def test_prep(self, capsys, tmp_path):
        path = tmp_path / "v.csv"
        path.write_text("1\n2\n8\n")
        code, text = run(capsys, "prep", "--vector", str(path), "--method", "binned")
        res = json.loads(text)
        assert code == 0 and res["q"] == 3 and res["fidelity"] >= 1 - 1e-10
        code, text = run(capsys, "prep", "--vector", str(path), "--method", "flat")
        assert json.loads(text)["method"] == "flat"

    def test_conditioning_sweep(self, capsys):
        code, text = run(capsys, "conditioning", "--sweep", "--sizes", "8..32", "--trials", "30", "--seed", "1")
        res = json.loads(text)
        assert code == 0 and res["bound_4sqrt2_ok"] and res["trials"] == 30

    def test_conditioning_single(self, capsys, triangle_csv):
        code, text = run(capsys, "conditioning", "--input", str(triangle_csv), "--boundary", "clamped")
        assert code == 0 and json.loads(text)["kappa"] <= 4 * math.sqrt(2)

    def test_hhl_solve(self, capsys, tmp_path):
        (tmp_path / "A.csv").write_text("2,1,0\n1,2,1\n0,1,2\n")
        (tmp_path / "b.csv").write_text("1\n0\n-1\n")
        code, text = run(capsys, "hhl-solve", "--matrix", str(tmp_path / "A.csv"), "--rhs",
                         str(tmp_path / "b.csv"), "--phase-bits", "10", "--min-fidelity", "0.99")
        res = json.loads(text)
        assert code == 0 and res["fidelity_vs_direct"] >= 0.99

    def test_hhl_solve_fidelity_gate(self, capsys, tmp_path):
        (tmp_path / "A.csv").write_text("2,1\n1,3\n")
        (tmp_path / "b.csv").write_text("1\n0\n")
        code, _ = run(capsys, "hhl-solve", "--matrix", str(tmp_path / "A.csv"), "--rhs",
                      str(tmp_path / "b.csv"), "--phase-bits", "3", "--min-fidelity", "0.9999999")
        assert code == 1

    def test_missing_file(self, capsys):
        assert main(["prep", "--vector", "/nonexistent.csv"]) == 2
