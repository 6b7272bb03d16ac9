import io
import json
import subprocess
import sys

import numpy as np
import pytest

from dfs_forge.cli import main, parse_generator, run
from dfs_forge.io import encode_matrix
from dfs_forge.linalg import SIGMA_Z, random_special_unitary
from dfs_forge.operators import exchange, t_p
from dfs_forge.reports import Report, RunConfig, efficiency_curve, efficiency_point, table_degeneracies


def cells(rep):
    return {(r["n"], r["twoJ"]): r["n_J"] for r in rep.details["rows"]}


def test_table_examples():
    rep = table_degeneracies(12)
    assert rep.passed
    c = cells(rep)
    assert c[(6, 0)] == 5 and c[(1, 1)] == 1 and c[(12, 0)] == 132
    assert rep.metrics["published_cells"] == 15


def test_table_bounds():
    assert table_degeneracies(64).passed
    with pytest.raises(ValueError):
        table_degeneracies(65)


def test_efficiency_examples():
    p = efficiency_point(20)
    assert p["n_J0"] == 16796
    assert p["rate"] == pytest.approx(0.7018, abs=1e-4)
    assert p["asymptotic"] == pytest.approx(0.6759, abs=1e-4)
    assert p["gap"] == pytest.approx(0.026, abs=1e-3)
    assert efficiency_point(2)["k"] == 0
    rep = efficiency_curve([10, 20, 40, 60])
    assert rep.passed and rep.metrics["monotone"]
    with pytest.raises(ValueError):
        efficiency_point(7)


def test_report_requires_provenance():
    with pytest.raises(ValueError):
        Report("x", True, provenance="")


def run_lines(cfg):
    buf = io.StringIO()
    code = run(cfg, buf)
    return code, [json.loads(line) for line in buf.getvalue().splitlines()]


def test_verify_strong_four_passes():
    code, lines = run_lines(RunConfig("verify", model="strong", n=4, twoJ=0, n_samples=20))
    assert code == 0
    assert all(line["pass"] and line["provenance"] for line in lines)
    assert {"check", "pass", "worst_deviation", "details"} <= set(lines[0])


def test_basis_bad_label_is_input_error():
    code, lines = run_lines(RunConfig("basis", model="weak", n=3, twoJ=99))
    assert code == 2 and not lines[0]["pass"]


def test_basis_json_shape():
    code, (obj,) = run_lines(RunConfig("basis", model="strong", n=3, twoJ=1))
    assert code == 0
    assert obj["paths"] == [[1, -1, 1], [1, 1, -1]]
    assert np.array(obj["basis"]).shape == (8, 4, 2)


def test_closure_six_qubits():
    code, (obj,) = run_lines(RunConfig("closure", model="strong", n=6, tol=1e-8))
    assert code == 0
    assert {b["twoJ"]: b["dim"] for b in obj["per_block"]} == {0: 24, 2: 80, 4: 24, 6: 0}


def test_closure_with_too_few_generators_fails():
    code, (obj,) = run_lines(RunConfig("closure", model="strong", n=3, generators=["E12"], tol=1e-8))
    assert code == 1 and not obj["pass"]


def test_seeded_runs_are_byte_identical():
    def out(seed):
        buf = io.StringIO()
        run(RunConfig("verify", model="weak", n=3, twoJ=1, seed=seed, n_samples=15), buf)
        return buf.getvalue()

    assert out(5) == out(5)
    assert out(5) != out(6)


def test_parse_generator():
    assert parse_generator("E23", 4) == exchange(2, 3, 4)
    assert parse_generator("TP1:2", 3) == t_p(1, 2, 3)
    with pytest.raises(ValueError):
        parse_generator("E123", 12)
    with pytest.raises(ValueError):
        parse_generator("Q12", 3)


def test_main_table_csv(capsys):
    assert main(["table", "--max-n", "4", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,twoJ,n_J,published,path_count"
    assert len(lines) == 1 + 8


def test_main_compile(tmp_path, capsys):
    target = tmp_path / "u.json"
    target.write_text(json.dumps(encode_matrix(random_special_unitary(2, np.random.default_rng(0)))))
    assert main(["compile", "--n", "3", "--twoj", "1", "--target", str(target), "--epsilon", "1e-2"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["achieved_error"] <= 1e-2 and obj["length"] == len(obj["steps"])
    assert obj["prefix_leakage"] <= 1e-8


def test_main_compile_rejects_wrong_shape(tmp_path):
    target = tmp_path / "u.json"
    target.write_text(json.dumps(encode_matrix(np.eye(3))))
    assert main(["compile", "--n", "3", "--twoj", "1", "--target", str(target)]) == 2


def test_main_simulate_model_file(tmp_path, capsys):
    spec = {"F_ops": [encode_matrix(SIGMA_Z)], "a": encode_matrix([[1.0]]), "H_S": None,
            "rho0": encode_matrix(np.full((2, 2), 0.5)), "T": 0.1, "dt": 0.01,
            "block": {"model": "weak", "n": 1, "twoJ": 1}}
    path = tmp_path / "m.json"
    path.write_text(json.dumps(spec))
    assert main(["simulate", "--model-file", str(path)]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    assert rows[0] == "t,trace,block_population,lambda_fidelity"
    assert len(rows) == 12
    t, tr, pop, fid = map(float, rows[-1].split(","))
    assert t == pytest.approx(0.1) and tr == pytest.approx(1.0) and pop == pytest.approx(0.5)


def test_main_simulate_default_block(capsys):
    assert main(["simulate", "--n", "3", "--twoj", "1", "--format", "json"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["metrics"]["lambda_fidelity"] >= 1 - 1e-6


def test_cli_entry_point_runs():
    proc = subprocess.run([sys.executable, "-m", "dfs_forge.cli", "efficiency", "--n-list", "10,20"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["check"] == "efficiency_curve"


def test_dim_cap_env(monkeypatch):
    monkeypatch.setenv("DFS_FORGE_DIM_CAP", "16")
    code, _ = run_lines(RunConfig("basis", model="strong", n=5, twoJ=1))
    assert code == 2
