"""Analytic phase-estimation outcomes.

With exact controlled powers, measuring the phase register gives ``l``
with probability ``P(l) = sum_j |c_j|^2 |f(theta_j - l/2^N)|^2`` where
``f`` is the normalized Dirichlet kernel.  This module evaluates that
table and the diagnostics built on it, without ever forming a circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DomainError, MeasureZeroError, ValidationError

MAX_PHASE_QUBITS = 24
PEAK_FLOOR = 4.0 / math.pi**2
SERIES_CUTOFF = 1e-8
TABLE_BLOCK = 2**16  # kernel entries evaluated per block
SIDE_LOBE = 0.05


def phase_of_energy(energy, t: float):
    """``-E t mod 1`` in [0, 1). Works elementwise on arrays."""
    if not t > 0:
        raise DomainError("t must be positive")
    theta = np.mod(-np.asarray(energy, dtype=float) * t, 1.0)
    theta = np.where(theta >= 1.0, 0.0, theta)
    return float(theta) if np.ndim(theta) == 0 else theta


def _reduce(delta):
    # f has period 1 in delta; work in [-1/2, 1/2)
    delta = np.asarray(delta, dtype=float)
    return delta - np.floor(delta + 0.5)


def _sin_pi(x):
    """sin(pi x) with the argument reduced first, so large x stays accurate."""
    n = np.round(x)
    sign = 1.0 - 2.0 * np.mod(n, 2)
    return sign * np.sin(math.pi * (x - n))


def _kernel_ratio(r, n: int):
    """Real amplitude ``sin(pi M r) / (M sin(pi r))`` for reduced r, M = 2^N."""
    m = 2.0**n
    r = np.asarray(r, dtype=float)
    den = np.sin(math.pi * r)
    small = np.abs(den) < SERIES_CUTOFF
    safe = np.where(small, 1.0, den)
    out = np.asarray(_sin_pi(m * r) / (m * safe))
    if np.any(small):
        # sinc(M r) / sinc(r); the denominator's sinc by its series
        rs = np.atleast_1d(r)[np.atleast_1d(small)]
        nz = np.where(rs == 0.0, 1.0, rs)
        sinc_m = np.where(rs == 0.0, 1.0, _sin_pi(m * rs) / (math.pi * m * nz))
        sinc_1 = 1.0 - (math.pi * rs) ** 2 / 6.0
        if out.ndim:
            out[small] = sinc_m / sinc_1
        else:
            out = (sinc_m / sinc_1)[0]
    return out


def f_kernel(delta, n: int):
    """Complex kernel ``f(delta) = 2^-N sum_k exp(2 pi i k delta)``."""
    r = _reduce(delta)
    m = 2.0**n
    val = _kernel_ratio(r, n) * np.exp(1j * math.pi * (m - 1.0) * r)
    return complex(val) if np.ndim(val) == 0 else val


def _sin_pi_sq(x):
    # sin^2 has period 1, so no sign bookkeeping is needed
    return np.sin(math.pi * (x - np.round(x))) ** 2


def f_kernel_sq(delta, n: int):
    """``|f(delta)|^2``, equal to 1 at integer delta."""
    r = _reduce(delta)
    den = np.sin(math.pi * r) ** 2
    if np.any(np.abs(r) < SERIES_CUTOFF):
        val = _kernel_ratio(r, n) ** 2
    else:
        m = 2.0**n
        val = _sin_pi_sq(m * r) / (m * m * den)
    return float(val) if np.ndim(val) == 0 else val


def kappa_from_delta(delta_over_bin: float) -> float:
    return 2.0 * abs(delta_over_bin)


@dataclass(frozen=True)
class PhaseTable:
    thetas: np.ndarray
    weights: np.ndarray
    t: float
    N: int

    def __post_init__(self):
        thetas = np.asarray(self.thetas, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if thetas.shape != weights.shape or thetas.ndim != 1:
            raise ValidationError("thetas and weights must be 1-D of equal length")
        if np.any((thetas < 0) | (thetas >= 1)):
            raise ValidationError("phases must lie in [0, 1)")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-10:
            raise ValidationError(f"weights must be non-negative and sum to 1 (sum {weights.sum()!r})")
        if self.N < 1:
            raise ValidationError("N must be at least 1")
        object.__setattr__(self, "thetas", thetas)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_energies(cls, energies, weights, t: float, n: int) -> "PhaseTable":
        return cls(thetas=phase_of_energy(np.asarray(energies), t), weights=weights, t=t, N=n)

    @property
    def size(self) -> int:
        return 2**self.N


def nearest_bin(theta, n: int):
    """Round-half-up of ``2^N theta``, wrapped mod 2^N."""
    m = 2**n
    unwrapped = np.floor(np.asarray(theta, dtype=float) * m + 0.5).astype(np.int64)
    return np.mod(unwrapped, m)


def circular_distance(theta, l, n: int):
    """``|theta - l/2^N|`` measured on the unit circle."""
    d = np.abs(np.asarray(theta, dtype=float) - np.asarray(l) / 2.0**n)
    return np.minimum(d, 1.0 - d)


@dataclass(frozen=True)
class StatePeak:
    j: int
    theta: float
    weight: float
    l_j: int
    kappa: float
    peak: float


@dataclass(frozen=True)
class PhaseDistribution:
    probs: np.ndarray
    l_star: int
    delta_gap: float
    per_state: tuple[StatePeak, ...]
    N: int
    ground_weight: float

    @property
    def l0(self) -> int:
        return self.per_state[0].l_j


def _check_capacity(n: int) -> None:
    if n > MAX_PHASE_QUBITS:
        raise CapacityError(f"N = {n} exceeds the table limit of {MAX_PHASE_QUBITS} phase qubits")


def _probability_table(pt: PhaseTable) -> np.ndarray:
    grid = np.arange(pt.size) / pt.size
    probs = np.zeros(pt.size)
    keep = pt.weights != 0.0
    thetas, weights = pt.thetas[keep], pt.weights[keep]
    # fixed-size blocks of states, summed in a fixed order
    step = max(1, TABLE_BLOCK // pt.size)
    for i in range(0, len(thetas), step):
        k = f_kernel_sq(thetas[i : i + step, None] - grid[None, :], pt.N)
        probs += (weights[i : i + step, None] * k).sum(axis=0)
    return probs


def gap_at(probs: np.ndarray, l: int) -> float:
    """``P(l) - max_{j != l} P(j)``."""
    if len(probs) == 1:
        return float(probs[0])
    others = np.delete(probs, l)
    return float(probs[l] - others.max())


def phase_distribution(pt: PhaseTable) -> PhaseDistribution:
    _check_capacity(pt.N)
    probs = _probability_table(pt)
    l_star = int(np.argmax(probs))
    l_js = nearest_bin(pt.thetas, pt.N)
    kappas = np.minimum(1.0, 2.0 ** (pt.N + 1) * circular_distance(pt.thetas, l_js, pt.N))
    peaks = np.atleast_1d(f_kernel_sq(pt.thetas - l_js / pt.size, pt.N))
    per_state = [
        StatePeak(j=j, theta=float(theta), weight=float(w), l_j=int(lj), kappa=float(k), peak=float(pk))
        for j, (theta, w, lj, k, pk) in enumerate(zip(pt.thetas, pt.weights, l_js, kappas, peaks))
    ]
    return PhaseDistribution(
        probs=probs,
        l_star=l_star,
        delta_gap=gap_at(probs, l_star),
        per_state=tuple(per_state),
        N=pt.N,
        ground_weight=float(pt.weights[0]),
    )


def window_bound_constant(e: int) -> float:
    """``(1/pi^2) sum_{k=-e}^{e} 1/(1/2 - k)^2``."""
    return sum(1.0 / (0.5 - k) ** 2 for k in range(-e, e + 1)) / math.pi**2


def window_indices(center: int, e: int, n: int) -> np.ndarray:
    m = 2**n
    return np.unique(np.mod(np.arange(center - e, center + e + 1), m))


def window_probability(pd: PhaseDistribution, center: int, e: int) -> tuple[float, float]:
    """Probability mass within ``e`` bins of ``center`` (wrapping), and its lower bound.

    The bound is ``|c_0|^2`` times :func:`window_bound_constant`; it is only
    guaranteed when ``center`` is the ground state's nearest bin.
    """
    if e < 0:
        raise DomainError("e must be non-negative")
    idx = window_indices(center, e, pd.N)
    return float(pd.probs[idx].sum()), pd.ground_weight * window_bound_constant(e)


@dataclass(frozen=True)
class PostMeasurementState:
    l: int
    coeffs: np.ndarray
    probability: float

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    @property
    def ground_weight(self) -> float:
        return float(abs(self.coeffs[0]) ** 2)


def post_measurement(pt: PhaseTable, c, l: int) -> PostMeasurementState:
    """System-register coefficients after reading ``l`` from the phase register."""
    c = np.asarray(c, dtype=complex)
    if c.shape != pt.thetas.shape:
        raise ValidationError("overlap vector does not match the phase table")
    if not 0 <= l < pt.size:
        raise DomainError(f"l = {l} outside [0, {pt.size})")
    amp = c * f_kernel(pt.thetas - l / pt.size, pt.N)
    p = float(np.sum(np.abs(amp) ** 2))
    if p < 1e-300:
        raise MeasureZeroError(f"outcome l = {l} has zero probability")
    return PostMeasurementState(l=l, coeffs=amp / math.sqrt(p), probability=p)


@dataclass(frozen=True)
class LambdaRatios:
    l0: int
    ratios: np.ndarray  # entry 0 is the ground state itself (ratio 1)
    far: np.ndarray | None  # membership of the far set; None when N < 3


def lambda_ratios(pt: PhaseTable, l0: int) -> LambdaRatios:
    """Excited-to-ground kernel ratios at the ground bin ``l0``."""
    kern = f_kernel_sq(pt.thetas - l0 / pt.size, pt.N)
    ground = kern[0]
    if ground <= 0:
        raise MeasureZeroError("ground kernel vanishes at l0")
    far = None
    if pt.N >= 3:
        far = circular_distance(pt.thetas, l0, pt.N) > 1.0 / pt.size
    return LambdaRatios(l0=l0, ratios=kern / ground, far=far)


@dataclass
class InitialStateReport:
    N: int
    l0: int
    ground_weight: float
    ground_peak: float
    threshold: float
    threshold_met: bool
    average_weight_ok: bool
    average_dominance_ok: bool
    strong_projection: bool | None
    weak_projection: bool | None
    projected_ground_weight: float | None
    degenerate_groups: list[list[int]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def initial_state_diagnostics(pt: PhaseTable, c, weight_floor: float = 1e-12) -> InitialStateReport:
    """Check the initial-state conditions at the ground bin of this table."""
    c = np.asarray(c, dtype=complex)
    w = pt.weights
    l0 = int(nearest_bin(pt.thetas[0], pt.N))
    lam = lambda_ratios(pt, l0)
    ground_peak = f_kernel_sq(pt.thetas[0] - l0 / pt.size, pt.N)
    threshold = 0.5 / ground_peak - float(np.dot(w[1:], lam.ratios[1:]))
    notes = []
    if threshold <= 0:
        notes.append("threshold is non-positive; condition holds trivially")
    excited = w[1:]
    dominance = bool(np.all(w[0] >= 3.0 * excited)) if excited.size else True

    strong = weak = proj_w = None
    try:
        post = post_measurement(pt, c, l0)
    except MeasureZeroError:
        notes.append(f"P(l0 = {l0}) vanishes; projection flags not evaluated")
    else:
        pw = post.weights
        proj_w = float(pw[0])
        strong = bool(np.all(pw[0] >= 10.0 * pw[1:])) if pw.size > 1 else True
        weak = proj_w > float(w[0])
        if w[0] >= 1.0 - 1e-15:
            weak = True  # nothing left to amplify

    l_js = nearest_bin(pt.thetas, pt.N)
    groups: dict[int, list[int]] = {}
    for j in np.flatnonzero(w > weight_floor):
        groups.setdefault(int(l_js[j]), []).append(int(j))
    degenerate = [g for g in groups.values() if len(g) > 1]
    if degenerate:
        notes.append(f"phase degeneracy: {len(degenerate)} bin(s) shared by several states")
    return InitialStateReport(
        N=pt.N,
        l0=l0,
        ground_weight=float(w[0]),
        ground_peak=float(ground_peak),
        threshold=threshold,
        threshold_met=bool(w[0] > threshold),
        average_weight_ok=bool(w[0] >= 0.6),
        average_dominance_ok=dominance,
        strong_projection=strong,
        weak_projection=weak,
        projected_ground_weight=proj_w,
        degenerate_groups=degenerate,
        notes=notes,
    )
