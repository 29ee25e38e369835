"""``qpe`` command-line front end.

Subcommands ``plan``, ``distribution``, ``sweep`` and ``shots`` write their
data to files under ``--out``; everything human-readable goes to stderr.
Exit codes: 0 success, 2 bad input, 1 internal error.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, InputError, MeasureZeroError
from .export import write_csv, write_json
from .hamiltonian import (
    InitialState,
    LCUHamiltonian,
    Spectrum,
    commutator_constant_c1,
    dense_matrix,
    diagonalize,
    expectation_energy,
    one_norm,
    overlaps,
    parse_initial_state,
    parse_lcu,
    without_identity,
)
from .planner import (
    CHEMICAL_ACCURACY,
    DEFAULT_A_SWEEP,
    InitEnergy,
    KnownGapOrder,
    LCUOneNorm,
    QPEPlan,
    TrotterBudget,
    accuracy_window,
    budget_from_scaled_constant,
    make_plan,
    reconstruct_energy,
    trotter_budget,
)
from .shots import (
    GENERATOR_NAME,
    circular_spread,
    hoeffding_trial,
    sample_shots,
    window_count,
)
from .spectral import (
    PhaseTable,
    initial_state_diagnostics,
    lambda_ratios,
    nearest_bin,
    phase_distribution,
    post_measurement,
    window_probability,
)
from .trotter import (
    TrotterSpec,
    effective_spectrum,
    first_order_regime_exceeded,
    ground_fidelity,
    max_phase_error,
    trotter_error,
    trotterized_phase_table,
)

STRATEGIES = ("lcu-norm", "init-energy", "known-gap")
EXACT = None  # trotter multiplier sentinel for the exact unitary
DISTRIBUTION_FLOOR = 1e-16
SELECT_SHOTS = 50

DEFAULTS = {
    "alpha": None,
    "d": None,
    "epsilon_chem": CHEMICAL_ACCURACY,
    "a": list(DEFAULT_A_SWEEP),
    "trotter_order": 1,
    "shots_epsilon": 0.01,
    "trials": 200,
    "seed": 0,
    "drop_identity": False,
    "energy_shift": 0.0,
    "out": ".",
    "select_a": False,
    "select_shots": SELECT_SHOTS,
}


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


def _mult(text: str):
    if text.lower() in ("inf", "exact"):
        return EXACT
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid Trotter multiplier {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("Trotter multiplier must be >= 1")
    return value


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value file; command-line flags take precedence")
    p.add_argument("--hamiltonian", help="Pauli-sum Hamiltonian file")
    p.add_argument("--init", help="initial-state file")
    p.add_argument("--strategy", action="append", choices=STRATEGIES, help="time-step rule (repeatable for sweep)")
    p.add_argument("--alpha", type=float, help="alpha for init-energy [1, 1.5] or lcu-norm (0, 1]")
    p.add_argument("--d", type=int, help="known-gap order: t = 10^d")
    p.add_argument("--epsilon-chem", type=float, help="target accuracy in Hartree (default 1.6e-3)")
    p.add_argument("--a", type=int, nargs="+", help="extra phase qubits beyond N_min (default 0 1 2 3)")
    p.add_argument("--N", type=int, help="phase-register size override")
    p.add_argument("--trotter-order", type=int, choices=(1, 2))
    p.add_argument("--trotter-mult", type=_mult, nargs="+", help="multipliers of 2^q, or 'inf'")
    p.add_argument("--shots-epsilon", type=float, help="allowed failure probability (default 0.01)")
    p.add_argument("--trials", type=int, help="sampling trials per N (default 200)")
    p.add_argument("--seed", type=int, help="base seed; trial i uses seed + i")
    p.add_argument(
        "--drop-identity", action="store_true", default=None, help="move the identity term into the energy shift"
    )
    p.add_argument(
        "--energy-shift",
        type=float,
        help="constant removed from all energies before phase encoding (e.g. nuclear repulsion)",
    )
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--e-init", type=float, help="override <H> of the initial state")
    p.add_argument("--e0", type=float, help="override the exact ground energy")
    p.add_argument("--one-norm", type=float, help="override the LCU one-norm")
    p.add_argument("--c1", type=float, help="|C_1| for the first-order budget")
    p.add_argument("--c2", type=float, help="|C_2| for the second-order budget")
    p.add_argument("--script-c", type=float, help="scaled Trotter constant for --trotter-order")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpe", description="Phase estimation parameter planner.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("plan", "time step, register size and Trotter budgets"),
        ("distribution", "outcome probabilities and initial-state diagnostics"),
        ("sweep", "energy error and fidelity versus phase qubits"),
        ("shots", "shot budgets and seeded sampling trials"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "shots":
            p.add_argument("--shots", type=int, help="shots for histogram.csv (default m_eps)")
            p.add_argument("--select-a", action="store_true", default=None)
            p.add_argument("--select-shots", type=int)
    return parser


def load_config(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise InputError(f"{path}:line {lineno}: expected key=value")
        key, value = (s.strip() for s in body.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _merge_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}  # noqa: SLF001
    cfg = load_config(args.config) if args.config else {}
    for key, raw in cfg.items():
        action = actions.get(key)
        if action is None:
            raise InputError(f"unknown config key {key!r}")
        if getattr(args, key) is not None:
            continue  # command line wins
        try:
            if isinstance(action, argparse._StoreTrueAction):  # noqa: SLF001
                value = _bool(raw)
            elif action.nargs == "+" or isinstance(action, argparse._AppendAction):  # noqa: SLF001
                conv = action.type or str
                value = [conv(v) for v in raw.replace(",", " ").split()]
            else:
                value = (action.type or str)(raw)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise InputError(f"config key {key!r}: {exc}") from None
        if action.choices is not None:
            vals = value if isinstance(value, list) else [value]
            bad = [v for v in vals if v not in action.choices]
            if bad:
                raise InputError(f"config key {key!r}: invalid choice {bad[0]!r}")
        setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)


def _strategies(args) -> list:
    names = args.strategy or []
    if not names:
        raise InputError("select a time-step strategy with --strategy")
    if args.command != "sweep" and len(names) != 1:
        raise InputError(f"'{args.command}' takes exactly one --strategy")
    if len(set(names)) != len(names):
        raise InputError("duplicate --strategy")
    out = []
    for name in names:
        if name == "known-gap":
            if args.d is None:
                raise InputError("known-gap strategy needs --d")
            out.append(KnownGapOrder(args.d))
        elif name == "init-energy":
            out.append(InitEnergy(1.5 if args.alpha is None else args.alpha))
        else:
            out.append(LCUOneNorm(0.5 if args.alpha is None else args.alpha))
    return out


# ---------------------------------------------------------------------------
# Problem setup
# ---------------------------------------------------------------------------


@dataclass
class Problem:
    """Inputs in the phase convention: energies have ``shift`` removed."""

    h: LCUHamiltonian | None
    spectrum: Spectrum | None
    init: InitialState | None
    shift: float
    e_init: float | None
    e0: float | None
    one_norm: float | None
    notes: list


def _read(path: str | None, what: str) -> tuple[str, str]:
    if path is None:
        raise InputError(f"--{what} is required")
    p = Path(path)
    if not p.is_file():
        raise InputError(f"{what} file not found: {path}")
    return p.read_text(encoding="utf-8"), str(p)


def load_problem(args, need_state: bool) -> Problem:
    notes = []
    h = spectrum = init = None
    shift = float(args.energy_shift)
    e_init = e0 = norm = None
    if args.hamiltonian is not None or need_state:
        text, src = _read(args.hamiltonian, "hamiltonian")
        h = parse_lcu(text, source=src)
        if args.drop_identity:
            h, id_shift = without_identity(h)
            shift += id_shift
            notes.append(f"identity coefficient {id_shift!r} dropped from the phase Hamiltonian")
        norm = one_norm(h)
        if args.energy_shift:
            # a constant offset is a global phase; keep it as an identity term
            h = LCUHamiltonian.from_terms(h.terms + ((-float(args.energy_shift), "I" * h.n_qubits),))
            notes.append("one-norm excludes --energy-shift")
        spectrum = diagonalize(dense_matrix(h))
        e0 = spectrum.ground_energy
        if args.init is not None or need_state:
            itext, isrc = _read(args.init, "init")
            init = overlaps(spectrum, parse_initial_state(itext, source=isrc))
            e_init = expectation_energy(spectrum, init)
    # scalar overrides are given in the file's (total) convention
    if args.e_init is not None:
        e_init = args.e_init - shift
    if args.e0 is not None:
        e0 = args.e0 - shift
    if args.one_norm is not None:
        norm = args.one_norm
    return Problem(h, spectrum, init, shift, e_init, e0, norm, notes)


def _plan(strategy, prob: Problem, a: int, args) -> QPEPlan:
    plan = make_plan(strategy, prob.e_init, prob.one_norm, a, args.epsilon_chem, prob.shift)
    plan.notes.extend(prob.notes)
    if isinstance(strategy, LCUOneNorm) and args.energy_shift:
        plan.notes.append("--energy-shift moves E0 outside the one-norm guarantee; check ceil(E0 t)")
    return plan


def _exact_budget(p: int, n_min: int, a: int) -> TrotterBudget:
    per_q = [1] * (n_min + a)
    return TrotterBudget(
        p=p,
        C_p=0.0,
        script_C_p=0.0,
        n_min_per_q=per_q,
        n_min_tot=len(per_q),
        n_min_tot_approx=len(per_q),
        source="commuting terms",
        notes=["all terms commute: the product formula is exact, one step per power"],
    )


def _budgets(plan: QPEPlan, prob: Problem, args) -> list[TrotterBudget]:
    eps = args.epsilon_chem
    out = []
    if args.script_c is not None:
        out.append(
            budget_from_scaled_constant(
                args.trotter_order, args.script_c, plan.N_min, plan.a, eps, source="script_C_p input"
            )
        )
    if args.c1 is not None:
        b = trotter_budget(1, args.c1, plan.t, plan.N_min, plan.a, eps)
        b.source = "C_1 input"
        out.append(b)
    if args.c2 is not None:
        b = trotter_budget(2, args.c2, plan.t, plan.N_min, plan.a, eps)
        b.source = "C_2 input"
        out.append(b)
    if not out and prob.h is not None:
        if args.trotter_order == 1:
            c1 = commutator_constant_c1(prob.h)
            if c1 == 0.0:
                out.append(_exact_budget(1, plan.N_min, plan.a))
            else:
                b = trotter_budget(1, c1, plan.t, plan.N_min, plan.a, eps)
                b.source = "C_1 computed"
                out.append(b)
        else:
            plan.notes.append("second-order budget needs --c2 or --script-c")
    return out


def _check_ceil(plan: QPEPlan, prob: Problem) -> int | None:
    if prob.e0 is None:
        return None
    actual = math.ceil(prob.e0 * plan.t)
    if actual != plan.ceil_E0_t:
        msg = f"ceil(E0 t) = {actual} but the strategy assumes {plan.ceil_E0_t}"
        plan.notes.append(msg)
        _log(f"warning: {plan.strategy}: {msg}")
    return actual


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _single_mult(args):
    mults = args.trotter_mult or [EXACT]
    if len(mults) != 1:
        raise InputError(f"'{args.command}' takes a single --trotter-mult")
    return mults[0]


def _mult_label(mult) -> str:
    return "inf" if mult is EXACT else str(mult)


@dataclass
class Tables:
    """Phase table source for one (t, multiplier); re-binned per N."""

    thetas: np.ndarray
    weights: np.ndarray
    coeffs: np.ndarray
    trotterized: object  # TrotterizedTable or None
    t: float

    def at(self, n: int) -> PhaseTable:
        return PhaseTable(thetas=self.thetas, weights=self.weights, t=self.t, N=n)

    def fidelity(self, table: PhaseTable, l: int) -> float:
        post = post_measurement(table, self.coeffs, l)
        if self.trotterized is None:
            return post.ground_weight
        return ground_fidelity(self.trotterized, post.coeffs)


def make_tables(prob: Problem, t: float, mult, p: int) -> Tables:
    if mult is EXACT:
        w = prob.init.weights
        exact = PhaseTable.from_energies(prob.spectrum.energies, w / w.sum(), t, 1)
        return Tables(exact.thetas, exact.weights, prob.init.overlaps, None, t)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        tt = trotterized_phase_table(prob.h, prob.spectrum, prob.init, TrotterSpec(p, mult, 0, t), 1)
    for w in caught:
        _log(f"warning: t={t!r} n={mult}: {w.message}")
    return Tables(tt.table.thetas, tt.table.weights, tt.coeffs, tt, t)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _summary_row(plan: QPEPlan, ceil_e0: int | None) -> str:
    b = plan.trotter[0] if plan.trotter else None
    n0 = b.n_min_per_q[0] if b else "-"
    tot = f"{b.n_min_tot_approx} (sum {b.n_min_tot})" if b else "-"
    ceil_init = math.ceil(plan.E_init * plan.t) if plan.E_init is not None else "-"
    shown = plan.ceil_E0_t if ceil_e0 is None else ceil_e0
    return f"{plan.strategy:<24} {plan.t:<12.6g} {shown!s:>10} {ceil_init!s:>14} {plan.N_min:>5} {n0!s:>10}  {tot}"


def cmd_plan(args) -> int:
    (strategy,) = _strategies(args)
    prob = load_problem(args, need_state=False)
    a_list = args.a
    plan = _plan(strategy, prob, a_list[0], args)
    ceil_e0 = _check_ceil(plan, prob)
    plan.trotter = _budgets(plan, prob, args)
    doc = plan.to_dict()
    doc["E0"] = prob.e0
    doc["ceil_E0_t_exact"] = ceil_e0
    doc["a_sweep"] = [
        {
            "a": a,
            "N": plan.N_min + a,
            "e": accuracy_window(a),
            "n_min_tot": [
                b.n_min_tot
                for b in _budgets(_plan(strategy, prob, a, args), prob, args)
            ],
        }
        for a in a_list
    ]
    write_json(_out_dir(args) / "plan.json", doc)
    _log(f"{'strategy':<24} {'t':<12} {'ceil(E0 t)':>10} {'ceil(Einit t)':>14} {'N_min':>5} {'n_min(0,t)':>10}  n_min_tot")
    _log(_summary_row(plan, ceil_e0))
    for note in plan.notes:
        _log(f"note: {note}")
    return 0


def _state_rows(prob: Problem, table: PhaseTable, pd, post) -> list[dict]:
    rows = []
    for peak in pd.per_state:
        rows.append(
            {
                "j": peak.j,
                "energy": float(prob.spectrum.energies[peak.j]) + prob.shift,
                "theta": peak.theta,
                "weight": peak.weight,
                "l_j": peak.l_j,
                "kappa": peak.kappa,
                "peak": peak.peak,
                "weight_after": float(post.weights[peak.j]),
            }
        )
    return rows


def cmd_distribution(args) -> int:
    (strategy,) = _strategies(args)
    prob = load_problem(args, need_state=True)
    mult = _single_mult(args)
    plan = _plan(strategy, prob, args.a[0], args)
    ceil_e0 = _check_ceil(plan, prob)
    n = args.N if args.N is not None else plan.N
    tables = make_tables(prob, plan.t, mult, args.trotter_order)
    table = tables.at(n)
    pd = phase_distribution(table)
    post = post_measurement(table, tables.coeffs, pd.l_star)
    keep = np.flatnonzero(pd.probs > DISTRIBUTION_FLOOR)
    out = _out_dir(args)
    write_csv(
        out / "distribution.csv",
        ["l", "l_over_2N", "P"],
        ((int(l), l / table.size, float(pd.probs[l])) for l in keep),
    )
    l0 = int(nearest_bin(table.thetas[0], n))
    lam = lambda_ratios(table, l0)
    report = initial_state_diagnostics(table, tables.coeffs)
    windows = []
    for a in args.a:
        n_a = plan.N_min + a
        pd_a = pd if n_a == n else phase_distribution(tables.at(n_a))
        e = accuracy_window(a)
        total, bound = window_probability(pd_a, pd_a.l0, e)
        windows.append({"a": a, "N": n_a, "e": e, "center": pd_a.l0, "window_probability": total, "bound": bound})
    energy = reconstruct_energy(pd.l_star, n, plan.t, plan.ceil_E0_t) + prob.shift
    doc = {
        "strategy": plan.strategy,
        "t": plan.t,
        "ceil_E0_t": plan.ceil_E0_t,
        "ceil_E0_t_exact": ceil_e0,
        "N": n,
        "N_min": plan.N_min,
        "trotter_order": args.trotter_order,
        "trotter_mult": _mult_label(mult),
        "energy_shift": prob.shift,
        "E0": prob.e0 + prob.shift,
        "E_init": prob.e_init + prob.shift,
        "l_star": pd.l_star,
        "l0": l0,
        "delta_gap": pd.delta_gap,
        "energy_estimate": energy,
        "abs_error": abs(energy - (prob.e0 + prob.shift)),
        "dropped_mass": float(pd.probs.sum() - pd.probs[keep].sum()),
        "states": _state_rows(prob, table, pd, post),
        "post_measurement_l": pd.l_star,
        "lambda": {"l0": lam.l0, "ratios": lam.ratios, "far": lam.far},
        "conditions": report,
        "windows": windows,
        "notes": plan.notes,
    }
    write_json(out / "diagnostics.json", doc)
    _log(f"{plan.strategy}: N={n} l*={pd.l_star} E~{energy!r} delta={pd.delta_gap:.4g}")
    return 0


def _sweep_block(prob: Problem, plan: QPEPlan, mult, p: int, n_max: int, eps: float) -> list[list]:
    tables = make_tables(prob, plan.t, mult, p)
    e0 = prob.e0 + prob.shift
    rows = []
    crossed = False
    for n in range(1, n_max + 1):
        table = tables.at(n)
        pd = phase_distribution(table)
        energy = reconstruct_energy(pd.l_star, n, plan.t, plan.ceil_E0_t) + prob.shift
        err = abs(energy - e0)
        try:
            fid = tables.fidelity(table, pd.l_star)
        except MeasureZeroError:
            fid = 0.0
        ok = err <= eps
        first = ok and not crossed
        crossed = crossed or ok
        rows.append([plan.strategy, plan.t, plan.N_min, n, _mult_label(mult), pd.l_star, energy, err, fid, ok, first])
    return rows


def _trotter_row(prob: Problem, plan: QPEPlan, mult: int, args) -> list:
    spec = TrotterSpec(args.trotter_order, mult, 0, plan.t)
    c_p = args.c1 if args.trotter_order == 1 else args.c2
    err, bound = trotter_error(prob.h, prob.spectrum, spec, c_p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # matching warnings were already logged by the sweep
        eff = effective_spectrum(prob.h, prob.spectrum, spec)
    phase_err = max_phase_error(eff, prob.spectrum, plan.t)
    value, beyond = first_order_regime_exceeded(prob.h, prob.spectrum, spec)
    return [plan.strategy, plan.t, spec.p, mult, 0, err, "" if bound is None else bound, phase_err, value, beyond]


def cmd_sweep(args) -> int:
    strategies = _strategies(args)
    prob = load_problem(args, need_state=True)
    mults = args.trotter_mult or [1, 10, 100]
    plans = []
    for s in strategies:
        plan = _plan(s, prob, 0, args)
        _check_ceil(plan, prob)
        plans.append(plan)
    jobs = []
    for plan in plans:
        n_max = args.N if args.N is not None else plan.N_min + max(args.a)
        for mult in mults:
            jobs.append((plan, mult, n_max))
    # blocks run concurrently; rows are merged in job order
    with ThreadPoolExecutor() as pool:
        futures = [
            pool.submit(_sweep_block, prob, plan, mult, args.trotter_order, n_max, args.epsilon_chem)
            for plan, mult, n_max in jobs
        ]
        blocks = [f.result() for f in futures]
    trotter_rows = []
    for plan in plans:
        for mult in mults:
            if mult is EXACT:
                continue
            trotter_rows.append(_trotter_row(prob, plan, mult, args))
    if trotter_rows:
        write_csv(
            _out_dir(args) / "trotter.csv",
            ["strategy", "t", "p", "n", "q", "spectral_error", "bound", "max_phase_error", "regime_value", "beyond_first_order"],
            trotter_rows,
        )
    header = ["strategy", "t", "N_min", "N", "n_mult", "l_star", "energy", "abs_error", "fidelity", "chem_acc", "first_crossing"]
    rows = [r for block in blocks for r in block]
    write_csv(_out_dir(args) / "sweep.csv", header, rows)
    for block in blocks:
        hit = [r[3] for r in block if r[-1]]
        where = f"N={hit[0]}" if hit else "none"
        _log(f"{block[0][0]} n_mult={block[0][4]}: chemical accuracy from {where} (N_min={block[0][2]})")
    return 0


def _select_a(prob: Problem, tables: Tables, plan: QPEPlan, args) -> dict:
    ranking = []
    for a in args.a:
        n = plan.N_min + a
        pd = phase_distribution(tables.at(n))
        rec = sample_shots(pd, args.select_shots, args.seed + a)
        e = accuracy_window(a)
        frac = window_count(rec.counts, rec.empirical_top, e) / rec.m
        spread = circular_spread(rec.counts, rec.empirical_top)
        ranking.append({"a": a, "N": n, "e": e, "empirical_top": rec.empirical_top, "window_fraction": frac, "spread": spread})
    ranking.sort(key=lambda r: (-r["window_fraction"], r["spread"], r["a"]))
    return {"shots_per_a": args.select_shots, "chosen_a": ranking[0]["a"], "ranking": ranking}


def cmd_shots(args) -> int:
    (strategy,) = _strategies(args)
    prob = load_problem(args, need_state=True)
    mult = _single_mult(args)
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    plan = _plan(strategy, prob, 0, args)
    _check_ceil(plan, prob)
    tables = make_tables(prob, plan.t, mult, args.trotter_order)
    eps = args.shots_epsilon
    if not 0.0 < eps < 1.0:
        raise DomainError(f"--shots-epsilon must lie in (0, 1), got {eps}")
    n_list = [args.N] if args.N is not None else [plan.N_min + a for a in args.a]
    per_n = []
    dists = {}
    for n in n_list:
        pd = phase_distribution(tables.at(n))
        dists[n] = pd
        row = {"N": n, "l_star": pd.l_star, "delta_gap": pd.delta_gap}
        if pd.delta_gap <= 0.0:
            row.update(identifiable=False, m_eps=None, trial=None, note="not identifiable: delta_gap <= 0")
        else:
            trial = hoeffding_trial(pd, eps, args.trials, args.seed)
            row.update(identifiable=True, m_eps=trial.m_eps, trial=trial.to_dict())
        per_n.append(row)
    chosen = n_list[0]
    pd = dists[chosen]
    m = args.shots
    if m is None:
        m = per_n[0]["m_eps"] or 1000
    rec = sample_shots(pd, m, args.seed)
    doc = {
        "strategy": plan.strategy,
        "t": plan.t,
        "N_min": plan.N_min,
        "epsilon": eps,
        "trials": args.trials,
        "seed": args.seed,
        "generator": GENERATOR_NAME,
        "trotter_mult": _mult_label(mult),
        "per_N": per_n,
        "histogram": {"N": chosen, "shots": rec.m, "empirical_top": rec.empirical_top, "seed": rec.seed},
    }
    if args.select_a:
        doc["select_a"] = _select_a(prob, tables, plan, args)
    out = _out_dir(args)
    write_json(out / "shots.json", doc)
    nz = np.flatnonzero(rec.counts)
    write_csv(
        out / "histogram.csv",
        ["l", "count", "frequency"],
        ((int(l), int(rec.counts[l]), rec.counts[l] / rec.m) for l in nz),
    )
    for row in per_n:
        if row["identifiable"]:
            t = row["trial"]
            _log(f"N={row['N']}: m_eps={row['m_eps']} failure rate {t['failure_rate']:.4g} over {t['trials']} trials")
        else:
            _log(f"N={row['N']}: {row['note']}")
    if args.select_a:
        _log(f"selected a = {doc['select_a']['chosen_a']}")
    return 0


COMMANDS = {"plan": cmd_plan, "distribution": cmd_distribution, "sweep": cmd_sweep, "shots": cmd_shots}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(parser, args)
        return COMMANDS[args.command](args)
    except InputError as exc:
        _log(f"error: {exc}")
        return 2
    except Exception as exc:  # noqa: BLE001
        _log(f"internal error: {type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
