"""Pauli-sum Hamiltonians: parsing, dense matrices, spectra and norms.

A Hamiltonian is a real linear combination of Pauli strings,

    H = sum_b g_b P_b ,

stored one term per line in a plain text file::

    # H2-like toy model
    -0.4804 II
     0.3435 ZI
     0.0910 XX

The leftmost character of a label acts on qubit 0, which is the most
significant bit of a computational-basis index (``kron`` order).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    CapacityError,
    EmptyHamiltonianError,
    ParseError,
    ValidationError,
)

MAX_SYSTEM_QUBITS = 14
PAULI_AXES = "IXYZ"

_ZERO_TOL = 1e-14
_HERMITIAN_TOL = 1e-10
_NORM_TOL = 1e-6

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def check_pauli_string(label: str) -> str:
    if not label:
        raise ValidationError("empty Pauli string")
    bad = sorted(set(label) - set(PAULI_AXES))
    if bad:
        raise ValidationError(f"invalid Pauli axis {bad[0]!r} in {label!r}")
    if len(label) > MAX_SYSTEM_QUBITS:
        raise CapacityError(
            f"Pauli string of length {len(label)} exceeds {MAX_SYSTEM_QUBITS} qubits"
        )
    return label


@dataclass(frozen=True)
class LCUHamiltonian:
    """Immutable Pauli sum with merged, non-zero terms.

    Use :meth:`from_terms` or :func:`parse_lcu` rather than the raw
    constructor; they merge duplicates and drop cancelled terms.
    """

    terms: tuple[tuple[float, str], ...]
    n_qubits: int

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, str]]) -> "LCUHamiltonian":
        merged: dict[str, float] = {}
        n_qubits = None
        for coeff, label in terms:
            check_pauli_string(label)
            if n_qubits is None:
                n_qubits = len(label)
            elif len(label) != n_qubits:
                raise ValidationError(
                    f"Pauli string {label!r} has length {len(label)}, expected {n_qubits}"
                )
            merged[label] = merged.get(label, 0.0) + float(coeff)
        kept = tuple((c, s) for s, c in merged.items() if abs(c) > _ZERO_TOL)
        if not kept:
            raise EmptyHamiltonianError("Hamiltonian has no non-zero terms")
        return cls(terms=kept, n_qubits=n_qubits)

    @property
    def coefficients(self) -> np.ndarray:
        return np.array([c for c, _ in self.terms])

    @property
    def labels(self) -> list[str]:
        return [s for _, s in self.terms]

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def __len__(self) -> int:
        return len(self.terms)


def parse_lcu(text: str, source: str | None = None) -> LCUHamiltonian:
    """Parse the one-term-per-line Hamiltonian format.

    Raises
    ------
    ParseError
        On a malformed line; the error carries the 1-based line number.
    EmptyHamiltonianError
        When no term survives duplicate merging.
    """
    raw: list[tuple[float, str]] = []
    n_qubits = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 2:
            raise ParseError(
                f"expected '<coefficient> <pauli-string>', got {body!r}", lineno, source
            )
        coeff_text, label = parts
        try:
            coeff = float(coeff_text)
        except ValueError:
            raise ParseError(f"non-numeric coefficient {coeff_text!r}", lineno, source) from None
        if not math.isfinite(coeff):
            raise ParseError(f"non-finite coefficient {coeff_text!r}", lineno, source)
        bad = [ch for ch in label if ch not in PAULI_AXES]
        if bad:
            raise ParseError(f"invalid Pauli axis {bad[0]!r} in {label!r}", lineno, source)
        if n_qubits is None:
            n_qubits = len(label)
        elif len(label) != n_qubits:
            raise ParseError(
                f"Pauli string {label!r} has length {len(label)}, expected {n_qubits}",
                lineno,
                source,
            )
        if len(label) > MAX_SYSTEM_QUBITS:
            raise ParseError(f"more than {MAX_SYSTEM_QUBITS} qubits", lineno, source)
        raw.append((coeff, label))
    if not raw:
        raise EmptyHamiltonianError("no terms found" + (f" in {source}" if source else ""))
    return LCUHamiltonian.from_terms(raw)


def format_lcu(h: LCUHamiltonian) -> str:
    return "".join(f"{c!r} {s}\n" for c, s in h.terms)


def pauli_action(label: str) -> tuple[int, np.ndarray]:
    """Sparse form of a Pauli string.

    Returns ``(mask, phase)`` such that ``P|x> = phase[x] |x ^ mask>``.
    """
    n = len(label)
    x = np.arange(2**n)
    mask = 0
    phase = np.ones(2**n, dtype=complex)
    for i, axis in enumerate(label):
        if axis == "I":
            continue
        shift = n - 1 - i
        bit = (x >> shift) & 1
        if axis in "XY":
            mask |= 1 << shift
        if axis == "Z":
            phase *= 1 - 2 * bit
        elif axis == "Y":
            # Y|0> = i|1>, Y|1> = -i|0>
            phase *= 1j * (1 - 2 * bit)
    return mask, phase


def pauli_matrix(label: str) -> np.ndarray:
    mat = np.array([[1.0 + 0j]])
    for axis in label:
        mat = np.kron(mat, _PAULI_MATRICES[axis])
    return mat


def _check_capacity(n_qubits: int) -> None:
    if n_qubits > MAX_SYSTEM_QUBITS:
        raise CapacityError(f"{n_qubits} qubits exceeds the dense limit of {MAX_SYSTEM_QUBITS}")


def dense_matrix(h: LCUHamiltonian) -> np.ndarray:
    _check_capacity(h.n_qubits)
    dim = h.dim
    cols = np.arange(dim)
    mat = np.zeros((dim, dim), dtype=complex)
    for coeff, label in h.terms:
        mask, phase = pauli_action(label)
        mat[cols ^ mask, cols] += coeff * phase
    return mat


def one_norm(h: LCUHamiltonian) -> float:
    return float(np.sum(np.abs(h.coefficients)))


def identity_coefficient(h: LCUHamiltonian) -> float:
    ident = "I" * h.n_qubits
    return next((c for c, s in h.terms if s == ident), 0.0)


def without_identity(h: LCUHamiltonian) -> tuple[LCUHamiltonian, float]:
    """Split off the all-I term. Returns ``(traceless part, shift)``."""
    shift = identity_coefficient(h)
    rest = [(c, s) for c, s in h.terms if set(s) != {"I"}]
    if not rest:
        raise ValidationError("Hamiltonian is a pure constant; nothing left after dropping identity")
    return LCUHamiltonian(terms=tuple(rest), n_qubits=h.n_qubits), shift


def default_term_order(h: LCUHamiltonian) -> tuple[int, ...]:
    """Descending |coefficient|, stable on ties."""
    mags = np.abs(h.coefficients)
    return tuple(int(i) for i in sorted(range(len(h)), key=lambda i: -mags[i]))


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Spectrum:
    energies: np.ndarray
    eigenvectors: np.ndarray  # columns

    @property
    def dim(self) -> int:
        return len(self.energies)

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])


def _fix_phase(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    k = int(np.flatnonzero(mags >= mags.max() * (1 - 1e-9))[0])
    return v * (abs(v[k]) / v[k])


def _canonical_block(block: np.ndarray) -> np.ndarray:
    # Pivoted Gram-Schmidt of the projected basis vectors e_k: the result
    # depends only on the degenerate subspace, not on what LAPACK returned.
    dim, size = block.shape
    proj = block @ block.conj().T
    basis: list[np.ndarray] = []
    for _ in range(size):
        resid = proj.copy()
        for b in basis:
            resid -= np.outer(b, b.conj() @ proj)
        norms = np.linalg.norm(resid, axis=0)
        k = int(np.flatnonzero(norms >= norms.max() * (1 - 1e-9))[0])
        v = resid[:, k] / norms[k]
        basis.append(v)
    return np.column_stack([_fix_phase(v) for v in basis])


def diagonalize(m: np.ndarray, degeneracy_tol: float = 1e-9) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, ascending energies.

    Eigenvectors are made reproducible: every column has its largest
    component real and positive, and degenerate blocks are replaced by a
    canonical basis of the same subspace.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.conj().T)) > _HERMITIAN_TOL:
        raise ValidationError("matrix is not Hermitian")
    energies, vecs = np.linalg.eigh(m)
    scale = max(1.0, float(np.max(np.abs(energies))) if energies.size else 1.0)
    vecs = vecs.copy()
    start = 0
    n = len(energies)
    while start < n:
        stop = start + 1
        while stop < n and energies[stop] - energies[start] <= degeneracy_tol * scale:
            stop += 1
        if stop - start == 1:
            vecs[:, start] = _fix_phase(vecs[:, start])
        else:
            vecs[:, start:stop] = _canonical_block(vecs[:, start:stop])
        start = stop
    return Spectrum(energies=energies, eigenvectors=vecs)


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value, from the eigenvalues of M^dagger M."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    gram = m.conj().T @ m
    gram = 0.5 * (gram + gram.conj().T)
    top = float(np.linalg.eigvalsh(gram)[-1])
    return math.sqrt(max(top, 0.0))


# ---------------------------------------------------------------------------
# Initial states
# ---------------------------------------------------------------------------

STATE_SOURCES = ("computational-basis-index", "computational-amplitudes", "eigenbasis-amplitudes")


@dataclass(frozen=True)
class StateSpec:
    """An initial state as written by the user, before projection."""

    source: str
    index: int | None = None
    amplitudes: dict[int, complex] = field(default_factory=dict)

    def vector(self, dim: int) -> np.ndarray:
        vec = np.zeros(dim, dtype=complex)
        if self.index is not None:
            if not 0 <= self.index < dim:
                raise ValidationError(f"basis index {self.index} out of range for dimension {dim}")
            vec[self.index] = 1.0
            return vec
        for k, amp in self.amplitudes.items():
            if not 0 <= k < dim:
                raise ValidationError(f"amplitude index {k} out of range for dimension {dim}")
            vec[k] = amp
        return vec


@dataclass(frozen=True)
class InitialState:
    overlaps: np.ndarray
    source: str

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.overlaps) ** 2


def parse_initial_state(text: str, source: str | None = None) -> StateSpec:
    """Parse ``basis k`` / ``amp k re im`` / ``eig j re im`` lines."""
    kind = None
    index = None
    amps: dict[int, complex] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        key = parts[0]
        if key not in ("basis", "amp", "eig"):
            raise ParseError(f"unknown directive {key!r}", lineno, source)
        if kind is not None and key != kind:
            raise ParseError(f"cannot mix {kind!r} and {key!r} lines", lineno, source)
        if kind == "basis":
            raise ParseError("'basis' must be the only line", lineno, source)
        kind = key
        try:
            if key == "basis":
                if len(parts) != 2:
                    raise ValueError
                index = int(parts[1])
            else:
                if len(parts) != 4:
                    raise ValueError
                k = int(parts[1])
                amp = complex(float(parts[2]), float(parts[3]))
                if k in amps:
                    raise ParseError(f"duplicate index {k}", lineno, source)
                amps[k] = amp
        except ValueError:
            raise ParseError(f"malformed {key!r} line: {body!r}", lineno, source) from None
        if index is not None and index < 0 or any(k < 0 for k in amps):
            raise ParseError("negative index", lineno, source)
    if kind is None:
        raise ParseError("empty initial-state file", None, source)
    if kind == "basis":
        return StateSpec(source="computational-basis-index", index=index)
    src = "computational-amplitudes" if kind == "amp" else "eigenbasis-amplitudes"
    return StateSpec(source=src, amplitudes=amps)


def _normalized(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > _NORM_TOL:
        raise ValidationError(f"state is not normalized (norm {norm:.9g})")
    return vec / norm


def overlaps(s: Spectrum, init: StateSpec | int | Sequence[complex] | np.ndarray) -> InitialState:
    """Overlaps ``c_j = <psi_j|psi_init>`` of an initial state with the eigenbasis.

    ``init`` may be a basis index, a computational-basis amplitude vector,
    or a parsed :class:`StateSpec`.
    """
    if isinstance(init, StateSpec):
        vec = _normalized(init.vector(s.dim))
        if init.source == "eigenbasis-amplitudes":
            return InitialState(overlaps=vec, source=init.source)
        return InitialState(overlaps=s.eigenvectors.conj().T @ vec, source=init.source)
    if isinstance(init, (int, np.integer)):
        spec = StateSpec(source="computational-basis-index", index=int(init))
        return overlaps(s, spec)
    vec = np.asarray(init, dtype=complex)
    if vec.shape != (s.dim,):
        raise ValidationError(f"state has shape {vec.shape}, expected ({s.dim},)")
    vec = _normalized(vec)
    return InitialState(overlaps=s.eigenvectors.conj().T @ vec, source="computational-amplitudes")


def state_vector(s: Spectrum, init: InitialState) -> np.ndarray:
    """Computational-basis vector of an initial state."""
    return s.eigenvectors @ init.overlaps


def expectation_energy(s: Spectrum, init: InitialState) -> float:
    return float(np.dot(init.weights, s.energies))


# ---------------------------------------------------------------------------
# Commutator constants
# ---------------------------------------------------------------------------


def anticommutes(a: str, b: str) -> bool:
    """Symplectic test: odd number of sites with distinct non-identity axes."""
    clash = sum(1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y)
    return clash % 2 == 1


def commutator_norm(a: str, b: str) -> float:
    return 2.0 if anticommutes(a, b) else 0.0


def commutator_constant_c1(h: LCUHamiltonian) -> float:
    """First-order Trotter constant ``1/2 sum_{s<r} |g_r g_s| ||[P_r, P_s]||``."""
    _check_capacity(h.n_qubits)
    total = 0.0
    for s, (gs, ps) in enumerate(h.terms):
        for gr, pr in h.terms[s + 1 :]:
            if anticommutes(pr, ps):
                total += abs(gr * gs) * 2.0
    return 0.5 * total


def commutator_constant_c2(h: LCUHamiltonian, term_order: Sequence[int] | None = None) -> float:
    """Nested-commutator bound for the symmetric second-order formula.

    Dense evaluation of the commutator-scaling bound for the symmetric
    product: ``1/12 sum_a ||[B_a, [B_a, H_a]]|| + 1/24 sum_a ||[H_a, [H_a, B_a]]||``
    with ``B_a`` the sum of the terms after ``a``.  Both product
    orientations are evaluated and the larger value returned.  Only meant
    for small systems; the CLI expects ``|C_2|`` from the user.
    """
    _check_capacity(h.n_qubits)
    order = list(term_order) if term_order is not None else list(range(len(h)))
    mats = [h.terms[i][0] * pauli_matrix(h.terms[i][1]) for i in order]

    def comm(x, y):
        return x @ y - y @ x

    def bound(ms):
        total = 0.0
        tail = np.zeros_like(ms[0])
        for i in range(len(ms) - 1, -1, -1):
            a = ms[i]
            if i < len(ms) - 1:
                total += spectral_norm(comm(tail, comm(tail, a))) / 12.0
                total += spectral_norm(comm(a, comm(a, tail))) / 24.0
            tail = tail + a
        return total

    return max(bound(mats), bound(mats[::-1]))
