"""Second-quantized Hamiltonian in the MO basis and its Jordan-Wigner image.

Spin-orbital ordering is interleaved: qubit 2i is the alpha spin of spatial
orbital i, qubit 2i+1 the beta spin.  Qubit p occupied corresponds to bit p
set in the little-endian computational basis, matching the consumer's
statevector convention.
"""

from __future__ import annotations

import numpy as np

from .scf import SCFResult

# Pauli single-qubit products: (left, right) -> (phase, result)
_PAULI_MUL = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


def mo_integrals(res: SCFResult):
    """(h_pq, (pq|rs)) transformed to the molecular-orbital basis."""
    C = res.mo_coefficients
    h = C.T @ res.hcore @ C
    g = np.einsum("pi,qj,pqrs,rk,sl->ijkl", C, C, res.eri, C, C, optimize=True)
    return h, g


def spin_orbital_integrals(h_mo: np.ndarray, g_mo: np.ndarray):
    """Expand spatial integrals over interleaved spin orbitals.

    Returns (h_so, g_so) with g_so in physicists' notation <pq|rs> including
    spin delta factors, ready for H = sum h a+a + 1/2 sum g a+a+aa.
    """
    n_sp = h_mo.shape[0] * 2
    h_so = np.zeros((n_sp, n_sp))
    g_so = np.zeros((n_sp, n_sp, n_sp, n_sp))
    for p in range(n_sp):
        for q in range(n_sp):
            if p % 2 == q % 2:
                h_so[p, q] = h_mo[p // 2, q // 2]
    for p in range(n_sp):
        for q in range(n_sp):
            for r in range(n_sp):
                for s in range(n_sp):
                    # <pq|rs> = (pr|qs) with spin(p)=spin(r), spin(q)=spin(s)
                    if p % 2 == r % 2 and q % 2 == s % 2:
                        g_so[p, q, r, s] = g_mo[p // 2, r // 2, q // 2, s // 2]
    return h_so, g_so


def _ladder(p: int, n: int, dagger: bool):
    """Jordan-Wigner image of a_p(+) as {pauli tuple: coefficient}."""
    sign = -1j if dagger else 1j
    terms = {}
    for op, coef in (("X", 0.5), ("Y", sign * 0.5)):
        label = ["I"] * n
        for q in range(p):
            label[q] = "Z"
        label[p] = op
        terms[tuple(label)] = coef
    return terms


def _multiply(t1: dict, t2: dict, n: int) -> dict:
    out = {}
    for l1, c1 in t1.items():
        for l2, c2 in t2.items():
            phase = 1 + 0j
            label = []
            for q in range(n):
                ph, res = _PAULI_MUL[(l1[q], l2[q])]
                phase *= ph
                label.append(res)
            key = tuple(label)
            out[key] = out.get(key, 0j) + c1 * c2 * phase
    return {k: v for k, v in out.items() if abs(v) > 0}


def jordan_wigner(h_so: np.ndarray, g_so: np.ndarray, e_nuc: float,
                  tol: float = 1e-12) -> dict:
    """Qubit Hamiltonian as {pauli label tuple: real coefficient}."""
    n = h_so.shape[0]
    acc: dict = {tuple(["I"] * n): complex(e_nuc)}

    def add(terms: dict, scale: complex):
        for k, v in terms.items():
            acc[k] = acc.get(k, 0j) + scale * v

    create = [_ladder(p, n, True) for p in range(n)]
    annihilate = [_ladder(p, n, False) for p in range(n)]

    for p in range(n):
        for q in range(n):
            c = h_so[p, q]
            if abs(c) < tol:
                continue
            add(_multiply(create[p], annihilate[q], n), c)
    rs_products = {(r, s): _multiply(annihilate[r], annihilate[s], n)
                   for r in range(n) for s in range(n) if r != s}
    for p in range(n):
        for q in range(n):
            if p == q:
                continue
            pq = _multiply(create[p], create[q], n)
            for (r, s), rs in rs_products.items():
                c = g_so[p, q, s, r]   # a+p a+q a_r a_s pairs <pq|sr>
                if abs(c) < tol:
                    continue
                add(_multiply(pq, rs, n), 0.5 * c)

    out = {}
    for label, coef in acc.items():
        if abs(coef.imag) > 1e-9:
            raise ValueError(f"non-Hermitian accumulation at {label}: {coef}")
        if abs(coef.real) > tol:
            out[label] = float(coef.real)
    return out
