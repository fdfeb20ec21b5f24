import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from uctc import schemas
from uctc.cli import cross_validate, main
from uctc.cnf import count_models, dimacs_comments, emit_dimacs, parse_dimacs, random_cnf
from uctc.vv import sample_constraint


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return {
        "sat": write("sat.cnf", "p cnf 2 2\n1 0\n-2 0\n"),
        "unsat": write("unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n"),
        "empty": write("empty.cnf", "p cnf 2 0\n"),
        "bad": write("bad.cnf", "p cnf 2 2\n1 0\n-2\n"),
        "eight": write("eight.cnf", "p cnf 4 1\n4 0\n"),
        "swap": write("swap.qc", "qubits 2\nSWAP 0 1\n"),
        "ident": write("ident.qc", "qubits 2\n"),
        "badqc": write("bad.qc", "qubits 2\nX 0\nWHAT 1\n"),
        "write": write,
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, command, *argv):
    code, out, err = run(capsys, command, *argv, "--json")
    data = json.loads(out)
    jsonschema.validate(data, schemas.BY_COMMAND[command])
    return code, data


def test_solve_sat(capsys, files):
    code, out, _ = run(capsys, "solve", files["sat"])
    assert code == 10 and out.strip() == "SAT 10"


def test_solve_unsat(capsys, files):
    code, out, _ = run(capsys, "solve", files["unsat"])
    assert code == 20 and out.strip() == "UNSAT"


def test_solve_malformed(capsys, files):
    code, _, err = run(capsys, "solve", files["bad"])
    assert code == 1 and "line 3" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "solve", "/nonexistent/x.cnf")
    assert code == 1 and "error" in err


def test_solve_json_and_verbose(capsys, files):
    code, data = run_json(capsys, "solve", files["sat"], "--verbose", "--policy", "depol:1")
    assert code == 10 and data["witness"] == "10" and data["policy"] == "depol:1"
    assert "full_witness" in data


def test_solve_cap(capsys, files):
    path = files["write"]("big.cnf", "p cnf 9 0\n")
    assert run(capsys, "solve", path)[0] == 1


def test_brute(capsys, files):
    code, out, _ = run(capsys, "brute", files["sat"], "--list")
    assert code == 0 and out.split() == ["models", "1", "10"]
    code, data = run_json(capsys, "brute", files["empty"])
    assert data["count"] == 4


def test_vv_comment_roundtrip(capsys, files):
    code, out, _ = run(capsys, "vv", files["eight"], "--seed", "7")
    assert code == 0
    phi = parse_dimacs(out)
    assert phi.num_vars == 4
    meta = dimacs_comments(out)
    assert int(meta["k"]) == sample_constraint(4, 7).k and meta["seed"] == "7"
    _, data = run_json(capsys, "vv", files["eight"], "--seed", "7", "--mode", "auxiliary")
    assert data["mode"] == "auxiliary" and parse_dimacs(data["dimacs"]).original_vars == 4


def test_isolation_rate(capsys, files):
    code, data = run_json(capsys, "isolation-rate", files["eight"], files["unsat"], "--seeds", "10000")
    assert code == 0 and data["pass"]
    eight, unsat = data["rows"]
    assert eight["rate"] >= 1 / 40
    assert unsat["rate"] == 0.0 and not unsat["satisfiable"]


def test_isolation_rate_unsat_thousand_seeds(capsys, files):
    code, out, _ = run(capsys, "isolation-rate", files["unsat"], "--seeds", "1000")
    assert code == 0 and "rate=0.0000" in out


def test_pm_check_swap(capsys, files):
    code, data = run_json(capsys, "pm-check", files["swap"], "-m", "1")
    assert code == 0 and data["is_pure_pmg"]
    assert data["path_disagreement"] <= 1e-9


def test_pm_check_usat(capsys, files):
    code, data = run_json(capsys, "pm-check", "--usat", files["sat"])
    assert code == 0 and data["is_pure_pmg"]


def test_pm_check_identity(capsys, files):
    code, data = run_json(capsys, "pm-check", files["ident"], "-m", "1")
    assert code in (3, 4) and not data["is_pure_pmg"]
    assert code == (3 if data["is_pmg"] else 4)


def test_pm_check_errors(capsys, files):
    code, _, err = run(capsys, "pm-check", files["badqc"], "-m", "1")
    assert code == 1 and "line 3" in err
    assert run(capsys, "pm-check", files["swap"])[0] == 1
    assert run(capsys, "pm-check", files["swap"], "-m", "2")[0] == 1


def test_ctc_demo(capsys, files):
    code, data = run_json(capsys, "ctc-demo", files["sat"])
    assert code == 0 and data["witness"] == "10" and data["was_valid_pure_pmg"]
    code, data = run_json(capsys, "ctc-demo", files["unsat"])
    assert not data["verified"] and not data["was_valid_pure_pmg"]


def test_cross_validate(capsys):
    code, data = run_json(capsys, "cross-validate", "--samples", "30")
    assert code == 0 and data["max_gap"] <= 1e-9
    code, _ = run_json(capsys, "cross-validate", "--samples", "10", "--perturb", "1e-3")
    assert code == 2
    assert cross_validate(10, seed=4) == cross_validate(10, seed=4)


def test_bad_tolerance(capsys):
    assert run(capsys, "cross-validate", "--tol", "-1")[0] == 1


@pytest.mark.slow
def test_brute_and_solve_agree_on_corpus(capsys, tmp_path):
    rng = np.random.default_rng(77)
    for i in range(200):
        n = int(rng.integers(2, 4))
        phi = random_cnf(n, int(rng.integers(1, 4 * n + 4)), 2, int(rng.integers(2**31)))
        path = tmp_path / f"f{i}.cnf"
        path.write_text(emit_dimacs(phi))
        _, brute = run_json(capsys, "brute", str(path))
        code, solved = run_json(capsys, "solve", str(path), "--iterations", str(100 * n), "--seed", str(i))
        assert (brute["count"] > 0) == (solved["result"] == "SAT")
        assert code == (10 if brute["count"] else 20)
        assert brute["count"] == count_models(phi)


def cli(*argv):
    return subprocess.run(
        [sys.executable, "-m", "uctc", *argv], capture_output=True, check=False
    )


def test_subprocess_determinism(files):
    for argv in (
        ("solve", files["sat"], "--json", "--seed", "5", "--policy", "random"),
        ("vv", files["eight"], "--json", "--seed", "11"),
        ("ctc-demo", files["unsat"], "--json", "--policy", "random", "--seed", "2"),
    ):
        a, b = cli(*argv), cli(*argv)
        assert a.stdout == b.stdout and a.stdout
