"""Exact diagonalization of the generated qubit Hamiltonians.

Works on the Jordan-Wigner image directly: full-space lowest eigenvalue for
the recorded reference, and a particle-number-sector diagonalization as an
independent cross-check (JW preserves occupation number, so both must agree
whenever the global ground state lies in the neutral sector).
"""

from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

QUBIT_CAP = 14

_SINGLE = {
    "I": sparse.identity(2, format="csr", dtype=complex),
    "X": sparse.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex)),
    "Y": sparse.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex)),
    "Z": sparse.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex)),
}


def pauli_terms_to_sparse(terms: dict, n: int) -> sparse.csr_matrix:
    """{label tuple: coefficient} -> sparse matrix, qubit 0 least significant."""
    if n > QUBIT_CAP:
        raise ValueError(f"dimension guard: {n} qubits exceeds cap {QUBIT_CAP}")
    dim = 1 << n
    acc = sparse.csr_matrix((dim, dim), dtype=complex)
    for label, coef in terms.items():
        m = sparse.identity(1, format="csr", dtype=complex)
        for q in range(n - 1, -1, -1):   # highest qubit leftmost in the kron
            m = sparse.kron(m, _SINGLE[label[q]], format="csr")
        acc = acc + coef * m
    return acc


def ground_energy(terms: dict, n: int) -> float:
    """Lowest eigenvalue over the full 2^n space."""
    mat = pauli_terms_to_sparse(terms, n)
    if n <= 10:
        return float(np.linalg.eigvalsh(mat.toarray())[0])
    vals = eigsh(mat, k=1, which="SA", return_eigenvectors=False,
                 maxiter=5000, tol=0)
    return float(vals[0].real)


def sector_ground_energy(terms: dict, n: int, n_electrons: int) -> float:
    """Lowest eigenvalue restricted to fixed occupation number."""
    mat = pauli_terms_to_sparse(terms, n)
    idx = [b for b in range(1 << n) if bin(b).count("1") == n_electrons]
    sub = mat[np.ix_(idx, idx)].toarray()
    return float(np.linalg.eigvalsh(sub)[0])


def diagonal_energy(terms: dict, n: int, bits) -> float:
    """<b|H|b> for a computational basis state; bits[i] is qubit i."""
    b = sum(int(bit) << i for i, bit in enumerate(bits))
    e = 0.0
    for label, coef in terms.items():
        if any(p in ("X", "Y") for p in label):
            continue
        sign = 1
        for q, p in enumerate(label):
            if p == "Z" and (b >> q) & 1:
                sign = -sign
        e += coef * sign
    return e
