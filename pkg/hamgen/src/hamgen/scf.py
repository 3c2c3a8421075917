"""Restricted Hartree-Fock in a contracted Gaussian basis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import integrals
from .basis import ATOMIC_NUMBER, build_basis


class SCFError(RuntimeError):
    """Non-convergence, with diagnostics attached."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history or []


@dataclass(frozen=True)
class SCFResult:
    energy: float                 # total RHF energy incl. nuclear repulsion
    orbital_energies: np.ndarray
    mo_coefficients: np.ndarray   # columns are MOs over the AO basis
    n_electrons: int
    e_nuclear: float
    hcore: np.ndarray
    eri: np.ndarray               # chemists' (ij|kl) in the AO basis
    overlap: np.ndarray
    iterations: int

    @property
    def n_occupied(self) -> int:
        return self.n_electrons // 2


def run_rhf(atoms_bohr, basis: str, charge: int = 0,
            max_iter: int = 200, conv: float = 1e-10) -> SCFResult:
    """atoms_bohr: (element, xyz Bohr) pairs.  Closed-shell only."""
    n_elec = sum(ATOMIC_NUMBER[el] for el, _ in atoms_bohr) - charge
    if n_elec % 2:
        raise SCFError(f"open shell ({n_elec} electrons) not supported")
    n_occ = n_elec // 2

    for i, (_, xi) in enumerate(atoms_bohr):
        for _, xj in list(atoms_bohr)[i + 1:]:
            if sum((a - b) ** 2 for a, b in zip(xi, xj)) < 1e-12:
                raise SCFError("coincident atoms in geometry")

    funcs = build_basis(atoms_bohr, basis)
    charges_centers = [(ATOMIC_NUMBER[el], tuple(map(float, xyz)))
                       for el, xyz in atoms_bohr]
    S = integrals.overlap_matrix(funcs)
    T = integrals.kinetic_matrix(funcs)
    V = integrals.nuclear_matrix(funcs, charges_centers)
    eri = integrals.eri_tensor(funcs)
    e_nuc = integrals.nuclear_repulsion(charges_centers)
    hcore = T + V

    # symmetric orthogonalization
    s_val, s_vec = np.linalg.eigh(S)
    if np.min(s_val) < 1e-10:
        raise SCFError("overlap matrix is numerically singular")
    X = s_vec @ np.diag(s_val ** -0.5) @ s_vec.T

    def fock(D):
        J = np.einsum("ijkl,kl->ij", eri, D)
        K = np.einsum("ikjl,kl->ij", eri, D)
        return hcore + J - 0.5 * K

    def density(F):
        e_mo, C_ortho = np.linalg.eigh(X @ F @ X)
        C = X @ C_ortho
        occ = C[:, :n_occ]
        return 2.0 * occ @ occ.T, e_mo, C

    D, _, _ = density(hcore)
    history = []
    err_vecs, focks = [], []
    e_old = None
    for it in range(1, max_iter + 1):
        F = fock(D)
        # DIIS on the orthogonalized gradient FDS - SDF
        err = X @ (F @ D @ S - S @ D @ F) @ X
        err_vecs.append(err.ravel())
        focks.append(F)
        if len(err_vecs) > 8:
            err_vecs.pop(0)
            focks.pop(0)
        if len(focks) > 1:
            m = len(focks)
            B = -np.ones((m + 1, m + 1))
            B[m, m] = 0.0
            for a in range(m):
                for b in range(m):
                    B[a, b] = err_vecs[a] @ err_vecs[b]
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                coeff = np.linalg.solve(B, rhs)[:m]
                F = sum(c * fk for c, fk in zip(coeff, focks))
            except np.linalg.LinAlgError:
                pass
        D, e_mo, C = density(F)
        e_elec = 0.5 * np.sum(D * (hcore + fock(D)))
        e_tot = float(e_elec + e_nuc)
        history.append(e_tot)
        if e_old is not None and abs(e_tot - e_old) < conv \
                and float(np.max(np.abs(err))) < 1e-7:
            return SCFResult(e_tot, e_mo, C, n_elec, e_nuc, hcore, eri, S, it)
        e_old = e_tot
    raise SCFError(f"SCF did not converge in {max_iter} iterations "
                   f"(last dE = {history[-1] - history[-2]:.3e})", history)
