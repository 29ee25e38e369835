import csv
import json
import math

import pytest

from qpekit import cli
from qpekit.cli import main
from qpekit.planner import QPEPlan, accuracy_window, budget_from_scaled_constant, min_phase_qubits

from conftest import DATA, PKG_DATA

H2 = [
    "--hamiltonian", str(DATA / "h2_sto3g_050.ham"),
    "--init", str(DATA / "h2_sto3g_050.init"),
    "--script-c", "6e4",
]
SYN = ["--hamiltonian", str(PKG_DATA / "synthetic_2q.ham"), "--init", str(PKG_DATA / "synthetic_2q.init")]
R = 1 / math.sqrt(2)


def write(path, text):
    path.write_text(text)
    return str(path)


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def load_json(path):
    return json.loads(path.read_text())


def load_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def summary_row(doc):
    b = doc["trotter"][0]
    return (round(doc["t"], 6), doc["ceil_E0_t"], doc["ceil_E_init_t"], doc["N_min"], b["n_min_per_q"][0], b["n_min_tot_approx"])


@pytest.mark.parametrize(
    "flags,row",
    [
        (["--strategy", "known-gap", "--d", "1"], (10.0, -10, -10, 5, 1875, 60000)),
        (["--strategy", "init-energy", "--energy-shift", "1.058354421806"], (0.713827, -1, -1, 9, 118, 60000)),
        (["--strategy", "lcu-norm", "--alpha", "0.5", "--drop-identity"], (0.215149, 0, 0, 11, 30, 60000)),
    ],
)
def test_plan_reproduces_h2_rows(tmp_path, flags, row):
    assert run(tmp_path, "plan", *H2, *flags) == 0
    assert summary_row(load_json(tmp_path / "plan.json")) == row


def test_plan_from_scalars_only(tmp_path, capsys):
    assert run(tmp_path, "plan", "--strategy", "lcu-norm", "--e-init", "-1.042996", "--one-norm", "2.32397", "--script-c", "6e4") == 0
    assert summary_row(load_json(tmp_path / "plan.json")) == (0.215149, 0, 0, 11, 30, 60000)
    assert "0.215149" in capsys.readouterr().err


def test_plan_json_round_trip(tmp_path):
    assert run(tmp_path, "plan", *H2, "--strategy", "known-gap", "--d", "1", "--a", "2") == 0
    doc = load_json(tmp_path / "plan.json")
    plan = QPEPlan.from_dict(doc)
    assert plan.N_min == min_phase_qubits(plan.t, plan.epsilon_chem)
    assert plan.e == accuracy_window(2) == doc["e"]
    assert plan.N == doc["N"] == plan.N_min + 2
    b = plan.trotter[0]
    again = budget_from_scaled_constant(b.p, b.script_C_p, plan.N_min, plan.a, plan.epsilon_chem)
    assert again.n_min_per_q == b.n_min_per_q
    assert [r["a"] for r in doc["a_sweep"]] == [2]


def test_plan_single_term_alpha_one(tmp_path):
    ham = write(tmp_path / "x.ham", "0.7 X\n")
    assert run(tmp_path, "plan", "--hamiltonian", ham, "--strategy", "lcu-norm", "--alpha", "1", "--e-init", "-0.7") == 0
    doc = load_json(tmp_path / "plan.json")
    assert doc["ceil_E0_t"] == 0
    assert any("alpha = 1" in n for n in doc["notes"])
    # a single term has no commutators: the product formula is exact
    assert doc["trotter"][0]["source"] == "commuting terms"


def test_plan_computes_c1_from_hamiltonian(tmp_path):
    assert run(tmp_path, "plan", *H2[:4], "--strategy", "known-gap", "--d", "1") == 0
    b = load_json(tmp_path / "plan.json")["trotter"][0]
    assert b["C_p"] == pytest.approx(0.19693, abs=1e-4)


def test_config_file_and_precedence(tmp_path):
    cfg = write(tmp_path / "run.cfg", "# plan settings\nstrategy = known-gap\nd = 1\nepsilon-chem = 0.0032\na = 0 1\n")
    assert run(tmp_path, "plan", *H2, "--config", cfg) == 0
    doc = load_json(tmp_path / "plan.json")
    assert doc["N_min"] == 4 and doc["epsilon_chem"] == 0.0032
    assert run(tmp_path, "plan", *H2, "--config", cfg, "--d", "0") == 0
    assert load_json(tmp_path / "plan.json")["t"] == 1.0


def test_exit_code_on_invalid_input(tmp_path, capsys):
    assert run(tmp_path, "plan", "--hamiltonian", str(tmp_path / "missing.ham"), "--strategy", "known-gap", "--d", "1") == 2
    assert run(tmp_path, "plan", *H2) == 2
    assert run(tmp_path, "distribution", *H2, "--strategy", "known-gap", "--strategy", "lcu-norm", "--d", "1") == 2
    bad = write(tmp_path / "bad.ham", "0.5 XQ\n")
    assert run(tmp_path, "plan", "--hamiltonian", bad, "--strategy", "lcu-norm") == 2
    assert "line 1" in capsys.readouterr().err
    cfg = write(tmp_path / "bad.cfg", "colour = blue\n")
    assert run(tmp_path, "plan", *H2, "--config", cfg) == 2
    assert run(tmp_path, "plan", *H2, "--strategy", "init-energy", "--alpha", "2") == 2


def test_exit_code_on_internal_error(tmp_path, monkeypatch):
    def boom(args):
        raise RuntimeError("unexpected")

    monkeypatch.setitem(cli.COMMANDS, "plan", boom)
    assert run(tmp_path, "plan", *H2, "--strategy", "lcu-norm") == 1


def test_distribution_single_eigenstate_exact_bin(tmp_path):
    ham = write(tmp_path / "z.ham", "0.375 Z\n")
    init = write(tmp_path / "z.init", "basis 1\n")
    assert run(tmp_path, "distribution", "--hamiltonian", ham, "--init", init, "--strategy", "known-gap", "--d", "0") == 0
    rows = load_csv(tmp_path / "distribution.csv")
    assert len(rows) == 1
    assert float(rows[0]["P"]) == 1.0
    assert float(rows[0]["l_over_2N"]) == 0.375
    diag = load_json(tmp_path / "diagnostics.json")
    assert diag["energy_estimate"] == pytest.approx(-0.375)
    assert diag["delta_gap"] == 1.0


def test_distribution_diagnostics(tmp_path):
    assert run(tmp_path, "distribution", *SYN, "--strategy", "init-energy", "--a", "0", "1", "2") == 0
    diag = load_json(tmp_path / "diagnostics.json")
    rows = load_csv(tmp_path / "distribution.csv")
    assert sum(float(r["P"]) for r in rows) + diag["dropped_mass"] == pytest.approx(1.0, abs=1e-12)
    assert [w["a"] for w in diag["windows"]] == [0, 1, 2]
    assert all(w["window_probability"] >= w["bound"] - 1e-12 for w in diag["windows"])
    assert diag["states"][0]["weight_after"] >= diag["states"][0]["weight"]
    assert diag["abs_error"] <= 1.6e-3


def test_sweep_commuting_hamiltonian_identical_across_mults(tmp_path):
    ham = write(tmp_path / "c.ham", "-0.9 II\n0.3 ZI\n0.2 IZ\n0.1 ZZ\n")
    init = write(tmp_path / "c.init", "amp 0 0.2 0\namp 3 0.9797958971132712 0\n")
    assert run(tmp_path, "sweep", "--hamiltonian", ham, "--init", init, "--strategy", "init-energy", "--trotter-mult", "1", "10", "100") == 0
    rows = load_csv(tmp_path / "sweep.csv")
    assert sum(r["first_crossing"] == "1" for r in rows) == 3
    curves = {}
    for r in rows:
        curves.setdefault(r["n_mult"], []).append(r)
    assert len(curves) == 3
    first = curves["1"]
    for curve in curves.values():
        assert [(r["N"], r["l_star"], r["abs_error"]) for r in curve] == [(r["N"], r["l_star"], r["abs_error"]) for r in first]
        # fidelities go through a Schur decomposition per multiplier
        for r, r1 in zip(curve, first):
            assert float(r["fidelity"]) == pytest.approx(float(r1["fidelity"]), abs=1e-12)


def test_sweep_exact_mode_error_bound(tmp_path):
    assert run(tmp_path, "sweep", *SYN, "--strategy", "known-gap", "--d", "1", "--strategy", "init-energy", "--trotter-mult", "inf") == 0
    rows = load_csv(tmp_path / "sweep.csv")
    assert {r["n_mult"] for r in rows} == {"inf"}
    assert not (tmp_path / "trotter.csv").exists()
    checked = 0
    for r in rows:
        n, t = int(r["N"]), float(r["t"])
        if n >= int(r["N_min"]):
            assert float(r["abs_error"]) <= 1 / (2 ** (n + 1) * t) + 1e-12
            checked += 1
    assert checked >= 6


def test_sweep_writes_trotter_table(tmp_path):
    assert run(tmp_path, "sweep", *SYN, "--strategy", "known-gap", "--d", "1", "--trotter-mult", "1", "10", "--c1", "0.02") == 0
    rows = load_csv(tmp_path / "trotter.csv")
    assert [r["n"] for r in rows] == ["1", "10"]
    assert all(float(r["spectral_error"]) <= float(r["bound"]) for r in rows)


def test_shots_minimal_budget(tmp_path):
    ham = write(tmp_path / "z.ham", "0.375 Z\n")
    init = write(tmp_path / "z.init", "basis 1\n")
    assert run(tmp_path, "shots", "--hamiltonian", ham, "--init", init, "--strategy", "known-gap", "--d", "0", "--shots-epsilon", "0.1", "--a", "0") == 0
    doc = load_json(tmp_path / "shots.json")
    row = doc["per_N"][0]
    assert row["m_eps"] == 5
    assert row["trial"]["failures"] == 0
    hist = load_csv(tmp_path / "histogram.csv")
    assert [(r["count"], r["frequency"]) for r in hist] == [("5", "1.0")]


def test_shots_not_identifiable_is_reported(tmp_path):
    ham = write(tmp_path / "z.ham", "0.25 Z\n")
    init = write(tmp_path / "z.init", f"amp 0 {R!r} 0\namp 1 {R!r} 0\n")
    assert run(tmp_path, "shots", "--hamiltonian", ham, "--init", init, "--strategy", "known-gap", "--d", "0", "--N", "3") == 0
    row = load_json(tmp_path / "shots.json")["per_N"][0]
    assert row["identifiable"] is False
    assert row["m_eps"] is None
    assert "not identifiable" in row["note"]


def test_shots_trials_and_select_a(tmp_path):
    assert run(tmp_path, "shots", *SYN, "--strategy", "init-energy", "--trials", "100", "--shots-epsilon", "0.1", "--select-a") == 0
    doc = load_json(tmp_path / "shots.json")
    assert [r["N"] for r in doc["per_N"]] == [9, 10, 11, 12]
    for r in doc["per_N"]:
        assert r["trial"]["failure_rate"] <= 0.1
    sel = doc["select_a"]
    assert sel["chosen_a"] == sel["ranking"][0]["a"]
    assert sorted(r["a"] for r in sel["ranking"]) == [0, 1, 2, 3]
