"""Minimal STO-nG basis sets with contraction coefficients fit at import time.

Each basis function is a fixed contraction of primitive Gaussians chosen to
maximize overlap with a Slater-type orbital.  The fits are performed once per
(n_primitives, principal quantum number, angular momentum) for a unit Slater
exponent and rescaled to the element's exponent (alpha scales as zeta^2,
contraction coefficients are scale invariant).  2s and 2p contractions are
fit independently rather than as a shared sp shell; reference energies are
insensitive to this at the tolerance this package targets.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy import optimize

ANGSTROM_TO_BOHR = 1.8897259886

# Slater exponents for the minimal shells (standard molecular values)
SLATER_EXPONENTS = {
    "H": {"1s": 1.24},
    "He": {"1s": 1.69},
    "Li": {"1s": 2.69, "2s": 0.80, "2p": 0.80},
    "Be": {"1s": 3.68, "2s": 1.10, "2p": 1.10},
}

ATOMIC_NUMBER = {"H": 1, "He": 2, "Li": 3, "Be": 4}

SUPPORTED_BASES = ("STO-3G", "STO-6G")


class BasisError(ValueError):
    pass


@dataclass(frozen=True)
class ContractedGaussian:
    """One atomic basis function: sum_i c_i * N_i * x^l y^m z^n exp(-a_i r^2)."""
    center: tuple[float, float, float]     # Bohr
    powers: tuple[int, int, int]
    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]        # include primitive normalization
    label: str


def _radial_grid(zeta: float):
    # logarithmic-density grid resolves both the cusp region and the tail
    return np.linspace(1e-6, 40.0 / zeta, 20000)


def _slater_radial(n: int, zeta: float, r: np.ndarray) -> np.ndarray:
    if n == 1:
        norm = 2.0 * zeta ** 1.5
        return norm * np.exp(-zeta * r)
    if n == 2:
        norm = (zeta ** 5 / 3.0) ** 0.5 * 2.0
        return norm * r * np.exp(-zeta * r)
    raise BasisError(f"unsupported principal quantum number {n}")


def _gaussian_radial(l: int, alpha: float, r: np.ndarray) -> np.ndarray:
    # radial part of a normalized spherical-harmonic Gaussian, l = 0 or 1
    if l == 0:
        norm = (2.0 * alpha / np.pi) ** 0.75 * 2.0 * np.sqrt(np.pi) / 2.0
        # simpler: normalize numerically below; keep analytic prefactor for scale
        return (2.0 * alpha / np.pi) ** 0.75 * np.exp(-alpha * r * r)
    if l == 1:
        norm = (128.0 * alpha ** 5 / np.pi ** 3) ** 0.25
        return norm * r * np.exp(-alpha * r * r)
    raise BasisError(f"unsupported angular momentum {l}")


@functools.lru_cache(maxsize=None)
def _fit_expansion(n_prim: int, n_quantum: int, l: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Best n_prim-Gaussian expansion of a unit-exponent Slater orbital.

    Returns (exponents, contraction coefficients) where the coefficients
    multiply radially normalized primitives.  Maximizing <chi|fit> under
    <fit|fit> = 1 reduces, for fixed exponents, to c proportional to
    S^-1 t; the exponents are then optimized quasi-Newton in log space.
    """
    r = _radial_grid(1.0)
    w = r * r * np.gradient(r)
    chi = _slater_radial(n_quantum, 1.0, r)
    chi = chi / np.sqrt(np.sum(chi * chi * w))

    def primitives(log_alphas):
        g = np.array([_gaussian_radial(l, a, r) for a in np.exp(log_alphas)])
        norms = np.sqrt(np.sum(g * g * w, axis=1))
        return g / norms[:, None]

    def neg_overlap(log_alphas):
        g = primitives(log_alphas)
        S = (g * w) @ g.T
        t = (g * w) @ chi
        try:
            c = np.linalg.solve(S, t)
        except np.linalg.LinAlgError:
            return 0.0
        val = float(t @ c)
        return -val

    # even-tempered start covering the cusp and the tail
    start = np.log(np.geomspace(0.05, 30.0 if n_quantum == 1 else 8.0, n_prim))
    best = None
    for scale in (1.0, 0.5, 2.0):
        res = optimize.minimize(neg_overlap, start + np.log(scale),
                                method="Nelder-Mead",
                                options={"maxiter": 4000, "xatol": 1e-10,
                                         "fatol": 1e-14})
        if best is None or res.fun < best.fun:
            best = res
    log_alphas = best.x
    g = primitives(log_alphas)
    S = (g * w) @ g.T
    t = (g * w) @ chi
    c = np.linalg.solve(S, t)
    c = c / np.sqrt(c @ S @ c)
    order = np.argsort(-np.exp(log_alphas))
    alphas = np.exp(log_alphas)[order]
    c = c[order]
    overlap = float(t[order] @ c)
    if overlap < 0.995:
        raise BasisError(f"STO-{n_prim}G fit failed: overlap {overlap:.6f}")
    return tuple(float(a) for a in alphas), tuple(float(x) for x in c)


def _primitive_norm(l: int, m: int, n: int, alpha: float) -> float:
    """Normalization of a cartesian Gaussian x^l y^m z^n exp(-alpha r^2)."""
    def fact2(k):   # (-1)!! = 1 by convention
        out = 1
        while k > 1:
            out *= k
            k -= 2
        return out
    L = l + m + n
    num = (2.0 * alpha / np.pi) ** 0.75 * (4.0 * alpha) ** (L / 2.0)
    den = np.sqrt(float(fact2(2 * l - 1) * fact2(2 * m - 1) * fact2(2 * n - 1)))
    return float(num / den)


def shells_for_element(element: str, basis: str):
    """(n_quantum, l, zeta) triples for the element's minimal shells."""
    if basis not in SUPPORTED_BASES:
        raise BasisError(f"unsupported basis {basis!r}; supported: {SUPPORTED_BASES}")
    if element not in SLATER_EXPONENTS:
        raise BasisError(f"unsupported element {element!r}")
    zetas = SLATER_EXPONENTS[element]
    shells = [(1, 0, zetas["1s"])]
    if "2s" in zetas:
        shells.append((2, 0, zetas["2s"]))
        shells.append((2, 1, zetas["2p"]))
    return shells


def build_basis(atoms, basis: str) -> list[ContractedGaussian]:
    """Contracted functions for a geometry given as (element, xyz Bohr) pairs.

    Ordering: atoms in input order; per atom 1s, then (2s, 2px, 2py, 2pz)
    when present.
    """
    n_prim = 3 if basis == "STO-3G" else 6
    funcs = []
    for element, center in atoms:
        center = tuple(float(x) for x in center)
        for n_quantum, l, zeta in shells_for_element(element, basis):
            alphas_unit, coefs = _fit_expansion(n_prim, n_quantum, l)
            alphas = tuple(a * zeta * zeta for a in alphas_unit)
            if l == 0:
                powers_list = [(0, 0, 0)]
                names = [f"{n_quantum}s"]
            else:
                powers_list = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
                names = ["2px", "2py", "2pz"]
            for powers, name in zip(powers_list, names):
                full_coefs = tuple(
                    c * _primitive_norm(*powers, a)
                    for c, a in zip(coefs, alphas))
                funcs.append(ContractedGaussian(center, powers, alphas,
                                                full_coefs,
                                                f"{element} {name}"))
    return funcs
