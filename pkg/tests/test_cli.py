import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from ibcdof.cli import BOUNDS_COLUMNS, FEASIBILITY_COLUMNS, main, sweep_rows


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out) if out.strip() else None, err


# -- dof ------------------------------------------------------------------------

def test_dof_example(capsys):
    code, doc, _ = run_json(capsys, "dof", "--G", "3", "--K", "1", "--M", "5", "--N", "7")
    assert code == 0
    assert doc["d_quantity"] == "3/1"
    assert doc["d_quantity_approx"] == 3.0
    assert (doc["region"], doc["n"]) == ("II-B", 3)


def test_dof_region_one(capsys):
    code, doc, _ = run_json(capsys, "dof", "--G", "3", "--K", "2", "--M", "17", "--N", "5")
    assert code == 0
    assert doc["region"] == "I"
    assert doc["d_upper"] == "85/27"
    assert doc["achievable_by"] == "asymptotic-only"


@pytest.mark.parametrize("argv", [
    ["dof", "--G", "0", "--K", "1", "--M", "1", "--N", "1"],
    ["dof", "--G", "1", "--K", "1", "--M", "1", "--N", "1"],
    ["dof", "--G", "3", "--K", "1", "--M", "x", "--N", "1"],
    ["dof", "--G", "3", "--K", "1", "--M", "5"],
    ["feasible", "--G", "3", "--K", "1", "--M", "5", "--N", "7", "--d", "x/2"],
    ["feasible", "--G", "3", "--K", "1", "--M", "5", "--N", "7", "--d", "0"],
    ["sweep", "--G", "3", "--K", "2", "--M", "5..1", "--N", "1..2"],
    ["sweep", "--G", "3", "--K", "2", "--M", "1..2", "--N", "1..2", "--mode", "feasibility"],
    ["nosuch"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    doc = json.loads(err)
    assert doc["error"] == "usage" and doc["exit_code"] == 2


# -- feasible -------------------------------------------------------------------------

@pytest.mark.parametrize("argv, linear, asymptotic, proper", [
    (["--G", "3", "--K", "1", "--M", "1", "--N", "7", "--d", "2"], "infeasible", "infeasible", True),
    (["--G", "3", "--K", "2", "--M", "21", "--N", "21", "--d", "7"], "infeasible", "feasible", False),
    (["--G", "3", "--K", "1", "--M", "5", "--N", "7", "--d", "3"], "feasible", "feasible", True),
])
def test_feasible_examples(capsys, argv, linear, asymptotic, proper):
    code, doc, _ = run_json(capsys, "feasible", *argv)
    assert code == 0
    assert (doc["linear"], doc["asymptotic"], doc["proper_holds"]) == (linear, asymptotic, proper)


def test_feasible_binding_pair(capsys):
    _, doc, _ = run_json(capsys, "feasible", "--G", "3", "--K", "1", "--M", "1", "--N", "7",
                         "--d", "2")
    assert doc["binding_pair"] == {"p": 1, "q": 0, "side": "B", "n": 0}


def test_feasible_rational_d(capsys):
    _, doc, _ = run_json(capsys, "feasible", "--G", "3", "--K", "2", "--M", "7", "--N", "2",
                         "--d", "14/11", "--debug")
    assert doc["linear"] == "feasible"
    assert Fraction(doc["d"]) == Fraction(14, 11)


# -- chain and sequences ----------------------------------------------------------------

def test_chain(capsys):
    code, doc, _ = run_json(capsys, "chain", "--G", "3", "--K", "2", "--M", "24", "--N", "7")
    assert code == 0
    assert doc["dims"] == ["4/1", "1/1", "0/1"]
    assert doc["length"] == 3


def test_chain_genie_refused(capsys):
    code, _, err = run(capsys, "chain", "--G", "3", "--K", "1", "--M", "5", "--N", "7",
                       "--d", "4")
    assert code == 3
    assert json.loads(err)["detail"]["genie_bound"] == "3/1"


def test_chain_region_one(capsys):
    code, _, err = run(capsys, "chain", "--G", "3", "--K", "2", "--M", "17", "--N", "5")
    assert code == 3
    assert json.loads(err)["detail"]["region"] == "I"


def test_sequences(capsys):
    code, doc, _ = run_json(capsys, "sequences", "--G", "3", "--K", "2", "--n-max", "3")
    assert code == 0
    assert [row["C"] for row in doc["A"]] == ["inf", "4/1", "7/2", "24/7"]
    assert doc["A"][1]["D"] == "11/3"


# -- synth ------------------------------------------------------------------------

def test_synth_example(capsys):
    code, doc, _ = run_json(capsys, "synth", "--G", "3", "--K", "1", "--M", "5", "--N", "7",
                            "--seed", "7")
    assert code == 0
    assert doc["pass"] is True
    assert doc["zf_residual"] <= 1e-8


def test_synth_auto_extends(capsys):
    code, doc, _ = run_json(capsys, "synth", "--G", "3", "--K", "2", "--M", "8", "--N", "2")
    assert code == 0
    assert doc["extension"] == 3
    assert (doc["extended"]["M"], doc["extended"]["N"], doc["d"]) == (24, 6, 4)


def test_synth_region_one(capsys):
    code, out, err = run(capsys, "synth", "--G", "3", "--K", "2", "--M", "17", "--N", "5")
    assert code == 3
    doc = json.loads(err)
    assert doc["detail"]["dof"]["region"] == "I"
    assert doc["detail"]["verdict"]["asymptotic"] == "feasible"


def test_synth_bad_extension(capsys):
    code, _, _ = run(capsys, "synth", "--G", "3", "--K", "2", "--M", "8", "--N", "2",
                     "--extension", "4")
    assert code == 2


def test_synth_verification_failure(capsys):
    code, doc, _ = run_json(capsys, "synth", "--G", "3", "--K", "1", "--M", "5", "--N", "7",
                            "--zf-tol", "1e-30")
    assert code == 4
    assert doc["pass"] is False


def test_synth_dump(capsys, tmp_path):
    code, doc, _ = run_json(capsys, "synth", "--G", "3", "--K", "1", "--M", "5", "--N", "7",
                            "--dump", str(tmp_path))
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(doc["files"])


# -- sweep --------------------------------------------------------------------------

def test_sweep_bounds_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--G", "3", "--K", "2", "--M", "1..30", "--N", "1..30",
                       "--mode", "bounds")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0]) == BOUNDS_COLUMNS
    assert len(rows) == 900
    order = [(int(r["M"]), int(r["N"])) for r in rows]
    assert order == sorted(order)


def test_sweep_feasibility_json(capsys):
    code, out, _ = run(capsys, "--json", "sweep", "--G", "3", "--K", "2", "--M", "1..3",
                       "--N", "2..3", "--mode", "feasibility", "--d", "1")
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 6
    assert tuple(rows[0]) == FEASIBILITY_COLUMNS


def test_sweep_quantity_equals_decomposition_at_c_values():
    # C_1 = 4, C_2 = 7/2 for G=3, K=2 side A
    rows = sweep_rows(3, 2, (1, 40), (1, 12))
    hits = [r for r in rows if Fraction(r["M"], r["N"]) in (4, Fraction(7, 2))]
    assert hits
    assert all(r["d_quantity"] == r["d_decom"] for r in hits)


def _verdict_class(row):
    if row["linear"] == "feasible":
        return "linear"
    return "asymptotic-only" if row["asymptotic"] == "feasible" else "infeasible"


def test_sweep_verdict_bands():
    """At most three verdict classes per fixed-N line; the asymptotic verdict flips once."""
    rows = sweep_rows(3, 2, (1, 40), (1, 40), mode="feasibility", d=Fraction(2))
    for N in range(1, 41):
        line = [r for r in rows if r["N"] == N]
        assert len({_verdict_class(r) for r in line}) <= 3
        asym = [r["asymptotic"] == "feasible" for r in line]
        assert asym == sorted(asym)


def test_sweep_threads_deterministic(capsys, monkeypatch):
    argv = ["sweep", "--G", "3", "--K", "2", "--M", "1..20", "--N", "1..20"]
    monkeypatch.setenv("IA_DOF_THREADS", "1")
    _, single, _ = run(capsys, *argv)
    monkeypatch.setenv("IA_DOF_THREADS", "4")
    _, multi, _ = run(capsys, *argv)
    assert single == multi


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("IA_DOF_THREADS", "zero")
    code, _, _ = run(capsys, "sweep", "--G", "3", "--K", "2", "--M", "1..2", "--N", "1..2")
    assert code == 2


# -- process-level behaviour ----------------------------------------------------------

def test_module_entry_point_byte_identical():
    argv = [sys.executable, "-m", "ibcdof", "synth", "--G", "3", "--K", "1", "--M", "5",
            "--N", "7", "--seed", "3"]
    first = subprocess.run(argv, capture_output=True, check=True)
    second = subprocess.run(argv, capture_output=True, check=True)
    assert first.stdout == second.stdout


def test_json_rationals_round_trip(capsys):
    _, doc, _ = run_json(capsys, "dof", "--G", "3", "--K", "2", "--M", "7", "--N", "2")
    assert Fraction(doc["d_quantity"]) == Fraction(14, 11)
    assert doc["d_quantity_approx"] == pytest.approx(14 / 11)
