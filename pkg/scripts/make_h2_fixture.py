"""Regenerate tests/data/h2_sto3g_050.ham (needs pyscf; not a runtime dependency).

H2 / STO-3G at 0.5 Angstrom, Jordan-Wigner mapping with spin orbitals
ordered (1 alpha, 1 beta, 2 alpha, 2 beta).  Pauli coefficients are
obtained by trace projection of the dense qubit Hamiltonian, so no
operator algebra package is needed.  The nuclear repulsion is included
in the identity coefficient.
"""

import itertools
import sys

import numpy as np
from pyscf import ao2mo, gto, scf

from qpekit.hamiltonian import pauli_matrix


def jw_annihilators(n):
    z = np.diag([1.0, -1.0])
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])  # |1> -> |0>, occupation basis
    ops = []
    for p in range(n):
        mats = [z] * p + [lower] + [np.eye(2)] * (n - p - 1)
        out = np.array([[1.0]])
        for m in mats:
            out = np.kron(out, m)
        ops.append(out)
    return ops


def main(path):
    mol = gto.M(atom="H 0 0 0; H 0 0 0.5", basis="sto-3g", unit="Angstrom")
    mf = scf.RHF(mol).run(verbose=0)
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])
    nmo = c.shape[1]
    n = 2 * nmo
    a = jw_annihilators(n)
    ham = mol.energy_nuc() * np.eye(2**n)
    for p, q in itertools.product(range(n), repeat=2):
        if p % 2 == q % 2:
            ham = ham + h1[p // 2, q // 2] * a[p].T @ a[q]
    for p, q, r, s in itertools.product(range(n), repeat=4):
        if p % 2 == s % 2 and q % 2 == r % 2:
            v = eri[p // 2, s // 2, q // 2, r // 2]
            if v:
                ham = ham + 0.5 * v * a[p].T @ a[q].T @ a[r] @ a[s]
    lines = ["# H2 / STO-3G, R = 0.5 Angstrom, Jordan-Wigner, nuclear repulsion in II..I",
             f"# E_nuc = {float(mol.energy_nuc())!r}  E_HF = {float(mf.e_tot)!r}"]
    for label in itertools.product("IXYZ", repeat=n):
        label = "".join(label)
        coeff = float(np.trace(pauli_matrix(label) @ ham).real / 2**n)
        if abs(coeff) > 1e-12:
            lines.append(f"{coeff!r} {label}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/h2_sto3g_050.ham")
