"""Brute-force statevector QPE used to cross-check the analytic engine.

The full ``N + N_S`` qubit state is built with explicit matrices:
Hadamards on the phase register, the controlled-power ladder, then the
inverse Fourier transform.  The phase register occupies the high-order
bits; phase qubit ``q`` controls ``U^(2^q)``.  Exponential by design.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CapacityError, MeasureZeroError, ValidationError
from .hamiltonian import Spectrum
from .trotter import exact_unitary

MAX_ORACLE_PHASE_QUBITS = 4
MAX_ORACLE_SYSTEM_QUBITS = 2


def _hadamard_layer(n: int) -> np.ndarray:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    out = np.array([[1.0 + 0j]])
    for _ in range(n):
        out = np.kron(out, h)
    return out


def inverse_qft(n: int) -> np.ndarray:
    m = 2**n
    k = np.arange(m)
    return np.exp(-2j * math.pi * np.outer(k, k) / m) / math.sqrt(m)


def controlled_power(u: np.ndarray, q: int, n: int) -> np.ndarray:
    """Block-diagonal operator applying ``u^(2^q)`` where bit ``q`` of k is set."""
    dim = u.shape[0]
    upow = np.linalg.matrix_power(u, 2**q)
    eye = np.eye(dim, dtype=complex)
    full = np.zeros((2**n * dim, 2**n * dim), dtype=complex)
    for k in range(2**n):
        block = upow if (k >> q) & 1 else eye
        full[k * dim : (k + 1) * dim, k * dim : (k + 1) * dim] = block
    return full


def run_qpe_circuit(s: Spectrum, init, t: float, n: int) -> np.ndarray:
    """Pre-measurement state of the full register."""
    psi = np.asarray(init, dtype=complex)
    dim = s.dim
    n_sys = int(round(math.log2(dim)))
    if n > MAX_ORACLE_PHASE_QUBITS or n_sys > MAX_ORACLE_SYSTEM_QUBITS:
        raise CapacityError(
            f"oracle limited to N <= {MAX_ORACLE_PHASE_QUBITS}, N_S <= {MAX_ORACLE_SYSTEM_QUBITS}"
        )
    if psi.shape != (dim,):
        raise ValidationError("initial state does not match the system dimension")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValidationError("initial state is not normalized")
    eye_sys = np.eye(dim, dtype=complex)
    state = np.zeros(2**n * dim, dtype=complex)
    state[:dim] = psi
    state = np.kron(_hadamard_layer(n), eye_sys) @ state
    u = exact_unitary(s, t, 0)
    for q in range(n):
        state = controlled_power(u, q, n) @ state
    return np.kron(inverse_qft(n), eye_sys) @ state


def _split(fs: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(fs).reshape(-1, dim)


def marginal_distribution(fs: np.ndarray, dim: int) -> np.ndarray:
    return np.sum(np.abs(_split(fs, dim)) ** 2, axis=1)


def conditional_state(fs: np.ndarray, dim: int, l: int) -> np.ndarray:
    block = _split(fs, dim)[l]
    norm = np.linalg.norm(block)
    if norm**2 < 1e-12:
        raise MeasureZeroError(f"phase outcome {l} has (near) zero probability")
    return block / norm


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)) ** 2)
