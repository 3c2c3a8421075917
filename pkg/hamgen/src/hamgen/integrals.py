"""One- and two-electron integrals over contracted cartesian Gaussians.

McMurchie-Davidson scheme: products of Gaussians are expanded in Hermite
Gaussians (E coefficients), Coulomb kernels contract against Hermite
auxiliary integrals R_tuv built on the Boys function.  Supports s and p
functions (any total angular momentum the recursions allow, in fact; only
low momenta are exercised here).
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.special import hyp1f1

from .basis import ContractedGaussian


def boys(m: int, T: float) -> float:
    """F_m(T) = integral_0^1 u^(2m) exp(-T u^2) du."""
    return float(hyp1f1(m + 0.5, m + 1.5, -T) / (2.0 * m + 1.0))


@functools.lru_cache(maxsize=200000)
def _E(i: int, j: int, t: int, Qx: float, a: float, b: float) -> float:
    """Hermite expansion coefficient for G_i(a, x-A) G_j(b, x-B), Qx = Ax-Bx."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * Qx * Qx)
    if j == 0:
        return (0.5 / p * _E(i - 1, j, t - 1, Qx, a, b)
                - q * Qx / a * _E(i - 1, j, t, Qx, a, b)
                + (t + 1) * _E(i - 1, j, t + 1, Qx, a, b))
    return (0.5 / p * _E(i, j - 1, t - 1, Qx, a, b)
            + q * Qx / b * _E(i, j - 1, t, Qx, a, b)
            + (t + 1) * _E(i, j - 1, t + 1, Qx, a, b))


def _overlap_prim(a, la, A, b, lb, B) -> float:
    p = a + b
    out = 1.0
    for i in range(3):
        out *= _E(la[i], lb[i], 0, A[i] - B[i], a, b)
    return out * (math.pi / p) ** 1.5


def _kinetic_prim(a, la, A, b, lb, B) -> float:
    # T = -1/2 Laplacian on the ket, expanded in overlaps
    l, m, n = lb
    term0 = b * (2 * (l + m + n) + 3) * _overlap_prim(a, la, A, b, lb, B)
    term1 = -2.0 * b * b * (
        _overlap_prim(a, la, A, b, (l + 2, m, n), B)
        + _overlap_prim(a, la, A, b, (l, m + 2, n), B)
        + _overlap_prim(a, la, A, b, (l, m, n + 2), B))
    term2 = -0.5 * (
        l * (l - 1) * _overlap_prim(a, la, A, b, (l - 2, m, n), B)
        + m * (m - 1) * _overlap_prim(a, la, A, b, (l, m - 2, n), B)
        + n * (n - 1) * _overlap_prim(a, la, A, b, (l, m, n - 2), B))
    return term0 + term1 + term2


def _R(t: int, u: int, v: int, n: int, p: float, PC, boys_table) -> float:
    """Hermite Coulomb auxiliary integral (recursive)."""
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys_table[n]
    if t > 0:
        return ((t - 1) * _R(t - 2, u, v, n + 1, p, PC, boys_table)
                + PC[0] * _R(t - 1, u, v, n + 1, p, PC, boys_table))
    if u > 0:
        return ((u - 1) * _R(t, u - 2, v, n + 1, p, PC, boys_table)
                + PC[1] * _R(t, u - 1, v, n + 1, p, PC, boys_table))
    return ((v - 1) * _R(t, u, v - 2, n + 1, p, PC, boys_table)
            + PC[2] * _R(t, u, v - 1, n + 1, p, PC, boys_table))


def _nuclear_prim(a, la, A, b, lb, B, C) -> float:
    p = a + b
    P = [(a * A[i] + b * B[i]) / p for i in range(3)]
    PC = [P[i] - C[i] for i in range(3)]
    T = p * sum(x * x for x in PC)
    n_max = sum(la) + sum(lb)
    boys_table = [boys(n, T) for n in range(n_max + 1)]
    val = 0.0
    for t in range(la[0] + lb[0] + 1):
        Ex = _E(la[0], lb[0], t, A[0] - B[0], a, b)
        for u in range(la[1] + lb[1] + 1):
            Ey = _E(la[1], lb[1], u, A[1] - B[1], a, b)
            for v in range(la[2] + lb[2] + 1):
                Ez = _E(la[2], lb[2], v, A[2] - B[2], a, b)
                val += Ex * Ey * Ez * _R(t, u, v, 0, p, PC, boys_table)
    return 2.0 * math.pi / p * val


def _eri_prim(a, la, A, b, lb, B, c, lc, C, d, ld, D) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    P = [(a * A[i] + b * B[i]) / p for i in range(3)]
    Q = [(c * C[i] + d * D[i]) / q for i in range(3)]
    PQ = [P[i] - Q[i] for i in range(3)]
    T = alpha * sum(x * x for x in PQ)
    n_max = sum(la) + sum(lb) + sum(lc) + sum(ld)
    boys_table = [boys(n, T) for n in range(n_max + 1)]
    val = 0.0
    for t in range(la[0] + lb[0] + 1):
        E1x = _E(la[0], lb[0], t, A[0] - B[0], a, b)
        for u in range(la[1] + lb[1] + 1):
            E1y = _E(la[1], lb[1], u, A[1] - B[1], a, b)
            for v in range(la[2] + lb[2] + 1):
                E1z = _E(la[2], lb[2], v, A[2] - B[2], a, b)
                if E1x == 0.0 and E1y == 0.0 and E1z == 0.0:
                    continue
                for tau in range(lc[0] + ld[0] + 1):
                    E2x = _E(lc[0], ld[0], tau, C[0] - D[0], c, d)
                    for nu in range(lc[1] + ld[1] + 1):
                        E2y = _E(lc[1], ld[1], nu, C[1] - D[1], c, d)
                        for phi in range(lc[2] + ld[2] + 1):
                            E2z = _E(lc[2], ld[2], phi, C[2] - D[2], c, d)
                            sign = (-1.0) ** (tau + nu + phi)
                            val += (E1x * E1y * E1z * E2x * E2y * E2z * sign
                                    * _R(t + tau, u + nu, v + phi, 0,
                                         alpha, PQ, boys_table))
    return val * 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))


def _contract2(f, bra: ContractedGaussian, ket: ContractedGaussian, *extra):
    val = 0.0
    for ca, a in zip(bra.coefficients, bra.exponents):
        for cb, b in zip(ket.coefficients, ket.exponents):
            val += ca * cb * f(a, bra.powers, bra.center,
                               b, ket.powers, ket.center, *extra)
    return val


def overlap_matrix(funcs) -> np.ndarray:
    n = len(funcs)
    S = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            S[i, j] = S[j, i] = _contract2(_overlap_prim, funcs[i], funcs[j])
    return S


def kinetic_matrix(funcs) -> np.ndarray:
    n = len(funcs)
    T = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            T[i, j] = T[j, i] = _contract2(_kinetic_prim, funcs[i], funcs[j])
    return T


def nuclear_matrix(funcs, charges_centers) -> np.ndarray:
    """Sum over nuclei of -Z * <i| 1/|r-C| |j>."""
    n = len(funcs)
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            val = 0.0
            for Z, C in charges_centers:
                val -= Z * _contract2(_nuclear_prim, funcs[i], funcs[j], C)
            V[i, j] = V[j, i] = val
    return V


def eri_tensor(funcs) -> np.ndarray:
    """Chemists' notation (ij|kl) with full 8-fold symmetry exploited."""
    n = len(funcs)
    eri = np.zeros((n, n, n, n))
    done = set()
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    ij = i * (i + 1) // 2 + j
                    kl = k * (k + 1) // 2 + l
                    if ij < kl or (ij, kl) in done:
                        continue
                    done.add((ij, kl))
                    fi, fj, fk, fl = funcs[i], funcs[j], funcs[k], funcs[l]
                    val = 0.0
                    for ca, a in zip(fi.coefficients, fi.exponents):
                        for cb, b in zip(fj.coefficients, fj.exponents):
                            for cc, c in zip(fk.coefficients, fk.exponents):
                                for cd, d in zip(fl.coefficients, fl.exponents):
                                    val += ca * cb * cc * cd * _eri_prim(
                                        a, fi.powers, fi.center,
                                        b, fj.powers, fj.center,
                                        c, fk.powers, fk.center,
                                        d, fl.powers, fl.center)
                    for (p, q, r, s) in ((i, j, k, l), (j, i, k, l),
                                         (i, j, l, k), (j, i, l, k),
                                         (k, l, i, j), (l, k, i, j),
                                         (k, l, j, i), (l, k, j, i)):
                        eri[p, q, r, s] = val
    return eri


def nuclear_repulsion(charges_centers) -> float:
    e = 0.0
    items = list(charges_centers)
    for i in range(len(items)):
        Zi, Ci = items[i]
        for j in range(i + 1, len(items)):
            Zj, Cj = items[j]
            r = math.dist(Ci, Cj)
            e += Zi * Zj / r
    return e
