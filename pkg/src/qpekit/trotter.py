"""Product-formula approximations of the controlled powers U^(2^q).

``U = exp(-i 2 pi H t)``.  A first-order step applies every
``exp(-i g_b P_b tau / n)`` once in ``term_order``; the second-order step
applies the half-angle sequence forwards then backwards.  Pauli
exponentials are applied through their signed-permutation action, so no
Kronecker products are formed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .hamiltonian import (
    InitialState,
    LCUHamiltonian,
    Spectrum,
    commutator_constant_c1,
    default_term_order,
    pauli_action,
    spectral_norm,
    state_vector,
    _check_capacity,
)
from .spectral import PhaseTable, phase_of_energy
from .errors import DomainError, ValidationError


class MatchingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class TrotterSpec:
    p: int
    n: int
    q: int
    t: float
    term_order: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.p not in (1, 2):
            raise DomainError("Trotter order must be 1 or 2")
        if self.n < 1:
            raise DomainError("number of Trotter steps must be >= 1")
        if self.q < 0:
            raise DomainError("q must be non-negative")

    def order_for(self, h: LCUHamiltonian) -> tuple[int, ...]:
        if self.term_order is None:
            return default_term_order(h)
        order = tuple(int(i) for i in self.term_order)
        if sorted(order) != list(range(len(h))):
            raise ValidationError("term_order is not a permutation of the term indices")
        return order

    @property
    def total_angle(self) -> float:
        return 2.0 * math.pi * self.t * 2.0**self.q


def exact_unitary(s: Spectrum, t: float, q: int = 0) -> np.ndarray:
    """``V exp(-i 2 pi E t 2^q) V^dagger``, phases reduced mod 1 first."""
    frac = np.mod(s.energies * t * 2.0**q, 1.0)
    v = s.eigenvectors
    return (v * np.exp(-2j * math.pi * frac)) @ v.conj().T


def _apply_pauli_exp(mat: np.ndarray, coeff: float, label: str, angle: float) -> np.ndarray:
    """Left-multiply by ``exp(-i coeff angle P) = cos - i sin P``."""
    mask, phase = pauli_action(label)
    x = np.arange(mat.shape[0])
    src = x ^ mask
    # (P M)[y] = phase[y ^ mask] * M[y ^ mask]
    pm = phase[src, None] * mat[src]
    a = coeff * angle
    return math.cos(a) * mat - 1j * math.sin(a) * pm


def single_step(h: LCUHamiltonian, p: int, angle: float, order) -> np.ndarray:
    """One product-formula step for total angle ``angle`` (already divided by n)."""
    step = np.eye(h.dim, dtype=complex)
    terms = [h.terms[i] for i in order]
    if p == 1:
        for coeff, label in terms:
            step = _apply_pauli_exp(step, coeff, label, angle)
        return step
    for coeff, label in terms:
        step = _apply_pauli_exp(step, coeff, label, angle / 2)
    for coeff, label in reversed(terms):
        step = _apply_pauli_exp(step, coeff, label, angle / 2)
    return step


def trotter_step(h: LCUHamiltonian, spec: TrotterSpec) -> np.ndarray:
    """The full approximation of ``U^(2^q)`` with ``spec.n`` steps."""
    _check_capacity(h.n_qubits)
    step = single_step(h, spec.p, spec.total_angle / spec.n, spec.order_for(h))
    return np.linalg.matrix_power(step, spec.n)


def trotter_bound(c_p: float, spec: TrotterSpec) -> float:
    return c_p * spec.total_angle ** (spec.p + 1) / spec.n**spec.p


def trotter_error(
    h: LCUHamiltonian, s: Spectrum, spec: TrotterSpec, c_p: float | None = None
) -> tuple[float, float | None]:
    """Spectral-norm error of the product formula and the commutator bound.

    For ``p = 1`` the constant defaults to the exact first-order value; for
    ``p = 2`` it must be supplied, otherwise the bound is ``None``.
    """
    err = spectral_norm(exact_unitary(s, spec.t, spec.q) - trotter_step(h, spec))
    if c_p is None and spec.p == 1:
        c_p = commutator_constant_c1(h)
    bound = trotter_bound(c_p, spec) if c_p is not None else None
    return err, bound


@dataclass
class EffectiveSpectrum:
    phases: np.ndarray  # effective eigenphases, column order of `vectors`
    vectors: np.ndarray
    overlaps: np.ndarray  # <psi_j | v_k>
    assignment: np.ndarray  # exact index j -> effective column k
    unwrapped: bool
    warnings: list[str] = field(default_factory=list)

    def matched_phases(self) -> np.ndarray:
        """Effective phase assigned to each exact eigenstate."""
        return self.phases[self.assignment]


def _unitary_eig(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    from scipy.linalg import schur

    tri, z = schur(w, output="complex")
    return np.diag(tri).copy(), z


def _match(weights: np.ndarray, phases: np.ndarray, ratio: float = 1.2) -> tuple[np.ndarray, list[str]]:
    # greedy maximum-overlap assignment, exact j -> effective k
    dim = weights.shape[0]
    assign = np.full(dim, -1)
    used_rows = np.zeros(dim, bool)
    used_cols = np.zeros(dim, bool)
    msgs = []
    for j in range(dim):
        row = np.sort(weights[j])[::-1]
        if dim > 1 and row[1] > 0 and row[0] / row[1] < ratio:
            ks = np.argsort(weights[j])[::-1][:2]
            if abs(phases[ks[0]] - phases[ks[1]]) > 1e-9:
                msgs.append(f"ambiguous eigenphase match for exact state {j}")
    flat = np.argsort(weights, axis=None, kind="stable")[::-1]
    for idx in flat:
        j, k = divmod(int(idx), dim)
        if used_rows[j] or used_cols[k]:
            continue
        assign[j] = k
        used_rows[j] = used_cols[k] = True
        if used_rows.all():
            break
    return assign, msgs


def effective_spectrum(h: LCUHamiltonian, s: Spectrum, spec: TrotterSpec) -> EffectiveSpectrum:
    """Eigen-decomposition of the Trotterized ``U^(2^q)`` as QPE phases."""
    w = trotter_step(h, spec)
    eigvals, vecs = _unitary_eig(w)
    # U = exp(-i 2 pi H t) has eigenvalues exp(+i 2 pi theta) with theta = -E t mod 1
    phases = np.mod(np.angle(eigvals) / (2 * math.pi), 1.0)
    phases = np.where(phases >= 1.0, 0.0, phases)
    ov = s.eigenvectors.conj().T @ vecs
    assign, msgs = _match(np.abs(ov) ** 2, phases)
    for m in msgs:
        warnings.warn(m, MatchingWarning, stacklevel=2)
    unwrapped = bool(np.max(np.abs(s.energies)) * spec.t * 2.0**spec.q < 0.5)
    if not unwrapped:
        msgs.append("|E| t >= 1/2: phases are reported mod 1 without unwrapping")
    return EffectiveSpectrum(
        phases=phases, vectors=vecs, overlaps=ov, assignment=assign, unwrapped=unwrapped, warnings=msgs
    )


def max_phase_error(eff: EffectiveSpectrum, s: Spectrum, t: float, q: int = 0) -> float:
    exact = phase_of_energy(s.energies * 2.0**q, t)
    d = np.abs(eff.matched_phases() - exact)
    return float(np.max(np.minimum(d, 1.0 - d)))


@dataclass(frozen=True)
class TrotterizedTable:
    table: PhaseTable
    coeffs: np.ndarray  # initial state in the effective eigenbasis
    effective: EffectiveSpectrum


def trotterized_phase_table(
    h: LCUHamiltonian, s: Spectrum, init: InitialState, spec: TrotterSpec, n_phase: int
) -> TrotterizedTable:
    """Phase table of QPE driven by the Trotterized unitary.

    With ``n(q) = spec.n * 2^q`` steps for each controlled power, every
    power is exactly the ``2^q``-th power of the ``q = 0`` circuit, so the
    whole run is QPE on that single unitary.
    """
    if spec.q != 0:
        raise DomainError("build the Trotterized table from the q = 0 step")
    eff = effective_spectrum(h, s, spec)
    # column j of the effective basis is the one matched to exact state j
    perm = eff.assignment
    eff = EffectiveSpectrum(
        phases=eff.phases[perm],
        vectors=eff.vectors[:, perm],
        overlaps=eff.overlaps[:, perm],
        assignment=np.arange(len(perm)),
        unwrapped=eff.unwrapped,
        warnings=eff.warnings,
    )
    psi = state_vector(s, init)
    d = eff.vectors.conj().T @ psi
    weights = np.abs(d) ** 2
    weights = weights / weights.sum()
    table = PhaseTable(thetas=eff.phases, weights=weights, t=spec.t, N=n_phase)
    return TrotterizedTable(table=table, coeffs=d, effective=eff)


def ground_fidelity(tt: TrotterizedTable, coeffs_after: np.ndarray) -> float:
    """``|<psi_0|psi_out>|^2`` for a post-measurement state in the effective basis."""
    amp = tt.effective.overlaps[0] @ coeffs_after
    return float(abs(amp) ** 2)


def exact_phase_table(s: Spectrum, init: InitialState, t: float, n_phase: int) -> PhaseTable:
    w = init.weights
    return PhaseTable.from_energies(s.energies, w / w.sum(), t, n_phase)


def effective_hamiltonian(eff: EffectiveSpectrum, s: Spectrum, t: float) -> np.ndarray:
    """``H_S`` with the Trotterized step equal to ``exp(-i 2 pi H_S t)``.

    Each effective phase is unwrapped against the exact phase of the state
    it was matched to, so the branch choice follows the exact spectrum.
    """
    exact = phase_of_energy(s.energies, t)
    shift = eff.matched_phases() - exact
    shift = np.mod(shift + 0.5, 1.0) - 0.5
    energies = s.energies - shift / t
    v = eff.vectors[:, eff.assignment]
    return (v * energies) @ v.conj().T


def first_order_regime_exceeded(h: LCUHamiltonian, s: Spectrum, spec: TrotterSpec) -> tuple[float, bool]:
    """``2 pi t 2^q ||H - H_S||`` and whether it exceeds 1/2."""
    base = TrotterSpec(spec.p, spec.n, 0, spec.t, spec.term_order)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MatchingWarning)
        eff = effective_spectrum(h, s, base)
    dense = (s.eigenvectors * s.energies) @ s.eigenvectors.conj().T
    value = 2.0 * math.pi * spec.t * 2.0**spec.q * spectral_norm(dense - effective_hamiltonian(eff, s, spec.t))
    return value, value > 0.5
