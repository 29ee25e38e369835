"""Closed-form choices for the free parameters of phase estimation.

Everything here is scalar arithmetic: time step, phase-register size,
accuracy window, shot count and Trotter step budgets.  Energies are in
Hartree, times in atomic units.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .errors import DomainError

CHEMICAL_ACCURACY = 1.6e-3
DEFAULT_A_SWEEP = (0, 1, 2, 3)


@dataclass(frozen=True)
class KnownGapOrder:
    """``t = 10**d`` when the order of magnitude of E0 - E_init is known."""

    d: int
    name = "known-gap"


@dataclass(frozen=True)
class InitEnergy:
    """``t = -alpha / E_init`` with alpha in [1, 3/2]."""

    alpha: float = 1.5
    name = "init-energy"


@dataclass(frozen=True)
class LCUOneNorm:
    """``t = alpha / sum|g|`` with alpha in (0, 1]."""

    alpha: float = 0.5
    name = "lcu-norm"


TimeStepStrategy = KnownGapOrder | InitEnergy | LCUOneNorm


def strategy_label(strategy: TimeStepStrategy) -> str:
    if isinstance(strategy, KnownGapOrder):
        return f"known-gap(d={strategy.d})"
    return f"{strategy.name}(alpha={strategy.alpha!r})"


def select_time_step(
    strategy: TimeStepStrategy, e_init: float | None = None, one_norm: float | None = None
) -> tuple[float, int, str]:
    """Pick ``t`` and the integer ``ceil(E0 t)`` it makes known.

    Returns ``(t, ceil_E0_t, note)``.
    """
    if isinstance(strategy, KnownGapOrder):
        if e_init is None:
            raise DomainError("known-gap strategy needs E_init")
        d = int(strategy.d)
        t = 10.0**d
        ceil_e0t = math.ceil(e_init * t)
        note = (
            f"assumes E0 - E_init <= -1e{-(d + 1)} Ha (not verifiable here); "
            f"ceil(E0 t) taken as ceil(E_init t) = {ceil_e0t}"
        )
        return t, ceil_e0t, note
    if isinstance(strategy, InitEnergy):
        alpha = float(strategy.alpha)
        if not 1.0 <= alpha <= 1.5:
            raise DomainError(f"init-energy alpha must lie in [1, 3/2], got {alpha}")
        if e_init is None or not e_init < 0:
            raise DomainError(f"init-energy strategy needs E_init < 0, got {e_init}")
        t = -alpha / e_init
        bound = (1 - math.ceil(-alpha)) / alpha - 1
        note = (
            f"ceil(E0 t) = -1 provided (E0 - E_init)/E_init < {bound:.6g} "
            f"(max tolerated inaccuracy {100 * bound:.3g}%)"
        )
        return t, -1, note
    if isinstance(strategy, LCUOneNorm):
        alpha = float(strategy.alpha)
        if not 0.0 < alpha <= 1.0:
            raise DomainError(f"lcu-norm alpha must lie in (0, 1], got {alpha}")
        if one_norm is None or not one_norm > 0:
            raise DomainError(f"lcu-norm strategy needs a positive one-norm, got {one_norm}")
        t = alpha / one_norm
        note = "ceil(E0 t) = 0 since |E0| t <= ||H|| t <= alpha <= 1 for E0 <= 0"
        if alpha == 1.0:
            note += "; with alpha = 1 this is exact only if |E0| < one-norm (E0 = -one-norm aliases to phase 0)"
        return t, 0, note
    raise DomainError(f"unknown strategy {strategy!r}")


def min_phase_qubits(t: float, epsilon: float = CHEMICAL_ACCURACY) -> int:
    """``ceil(log2(1/(t eps))) - 1``, clamped to at least one qubit.

    The ceiling is found with exact rational arithmetic on the float
    inputs so that exact powers of two land on the right side.
    """
    if not (t > 0 and epsilon > 0):
        raise DomainError("t and epsilon must be positive")
    prod = Fraction(t) * Fraction(epsilon)
    if prod * 4 >= 1:
        return 1
    # smallest k with 2**k * prod >= 1
    k = max(2, math.floor(-math.log2(float(prod))) - 1)
    while Fraction(2**k) * prod < 1:
        k += 1
    while Fraction(2 ** (k - 1)) * prod >= 1:
        k -= 1
    return max(1, k - 1)


def accuracy_window(a: int) -> int:
    if a < 0:
        raise DomainError("a must be non-negative")
    return 0 if a == 0 else 2 ** (a - 1) - 1


def asymmetric_window(a: int, kappa: float, sign: int) -> tuple[int, int]:
    """Lower/upper reach ``(e1, e2)`` of the chemically accurate bins."""
    if a < 1:
        raise DomainError("a must be >= 1")
    if not 0.0 <= kappa <= 1.0:
        raise DomainError("kappa must lie in [0, 1]")
    if sign not in (-1, 1):
        raise DomainError("sign must be +1 or -1")
    # exact rationals: a tiny kappa must still move the floor off 2^(a-1)
    half = Fraction(2 ** (a - 1))
    shift = sign * Fraction(kappa) / 2
    return math.floor(half - shift), math.floor(half + shift)


def shot_budget(epsilon: float, delta_gap: float) -> int:
    """Shots so that the most probable outcome wins with probability 1 - epsilon."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < delta_gap <= 1.0:
        raise DomainError(
            f"probability gap must lie in (0, 1], got {delta_gap}; "
            "the most probable outcome is not identifiable"
        )
    return math.ceil(-2.0 * math.log(epsilon) / delta_gap**2)


def unitary_error_tolerance(q: int, n_min: int) -> float:
    return math.pi / 2.0 ** (n_min - q)


def reconstruct_energy(l: int, n: int, t: float, ceil_e0t: int) -> float:
    if not 0 <= l < 2**n:
        raise DomainError(f"phase integer {l} outside [0, 2^{n})")
    if not t > 0:
        raise DomainError("t must be positive")
    return -(l / 2**n) / t + ceil_e0t / t


@dataclass
class TrotterBudget:
    p: int
    C_p: float
    script_C_p: float
    n_min_per_q: list[int]
    n_min_tot: int
    n_min_tot_approx: int
    source: str = "C_p"
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def scaled_trotter_constant(p: int, c_p: float, epsilon: float = CHEMICAL_ACCURACY) -> float:
    """``pi * (|C_p| / eps**(p+1)) ** (1/p)``."""
    if p not in (1, 2):
        raise DomainError("only Trotter orders 1 and 2 are supported")
    if not c_p > 0:
        raise DomainError("C_p must be positive")
    return math.pi * (c_p / epsilon ** (p + 1)) ** (1.0 / p)


def budget_from_scaled_constant(
    p: int,
    script_c: float,
    n_min: int,
    a: int = 0,
    epsilon: float = CHEMICAL_ACCURACY,
    source: str = "script_C_p",
) -> TrotterBudget:
    if not script_c > 0:
        raise DomainError("scaled Trotter constant must be positive")
    per_q = [math.ceil(2.0**q / 2.0**n_min * script_c) for q in range(n_min + a)]
    c_p = epsilon ** (p + 1) * (script_c / math.pi) ** p
    notes = []
    if a > 0:
        notes.append(
            f"q >= N_min = {n_min}: first-order unitary tolerance pi/2^(N_min-q) >= pi, "
            "budgets for these q are extrapolated"
        )
    return TrotterBudget(
        p=p,
        C_p=c_p,
        script_C_p=script_c,
        n_min_per_q=per_q,
        n_min_tot=sum(per_q),
        n_min_tot_approx=math.ceil(2**a * script_c),
        source=source,
        notes=notes,
    )


def trotter_budget(
    p: int, c_p: float, t: float, n_min: int, a: int = 0, epsilon: float = CHEMICAL_ACCURACY
) -> TrotterBudget:
    """Minimum Trotter steps per controlled power and in total.

    ``t`` does not enter the formulas beyond ``n_min``; it is accepted
    so callers can pass a plan's fields straight through.
    """
    del t
    script_c = scaled_trotter_constant(p, c_p, epsilon)
    budget = budget_from_scaled_constant(p, script_c, n_min, a, epsilon, source="C_p")
    budget.C_p = c_p
    return budget


@dataclass
class QPEPlan:
    strategy: str
    t: float
    ceil_E0_t: int
    N_min: int
    a: int
    e: int
    epsilon_chem: float = CHEMICAL_ACCURACY
    E_init: float | None = None
    one_norm: float | None = None
    energy_shift: float = 0.0
    notes: list[str] = field(default_factory=list)
    trotter: list[TrotterBudget] = field(default_factory=list)

    @property
    def N(self) -> int:
        return self.N_min + self.a

    def to_dict(self) -> dict:
        d = asdict(self)
        d["N"] = self.N
        d["ceil_E_init_t"] = math.ceil(self.E_init * self.t) if self.E_init is not None else None
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "QPEPlan":
        fields_ = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        fields_["trotter"] = [TrotterBudget(**b) for b in d.get("trotter", [])]
        return cls(**fields_)


def make_plan(
    strategy: TimeStepStrategy,
    e_init: float | None = None,
    one_norm: float | None = None,
    a: int = 0,
    epsilon: float = CHEMICAL_ACCURACY,
    energy_shift: float = 0.0,
) -> QPEPlan:
    """Time step, register size and accuracy window for one strategy.

    ``e_init`` is expected in the convention the phases will use, i.e.
    with ``energy_shift`` already removed.
    """
    t, ceil_e0t, note = select_time_step(strategy, e_init, one_norm)
    n_min = min_phase_qubits(t, epsilon)
    notes = [note]
    raw = math.ceil(math.log2(1.0 / (t * epsilon))) - 1
    if raw < 1:
        notes.append(f"t eps >= 1/4: formula gives N_min = {raw}, clamped to 1")
    return QPEPlan(
        strategy=strategy_label(strategy),
        t=t,
        ceil_E0_t=ceil_e0t,
        N_min=n_min,
        a=a,
        e=accuracy_window(a),
        epsilon_chem=epsilon,
        E_init=e_init,
        one_norm=one_norm,
        energy_shift=energy_shift,
        notes=notes,
    )
