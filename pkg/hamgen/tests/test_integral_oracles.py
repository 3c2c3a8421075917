"""Integral engine against closed-form and quadrature oracles."""

import numpy as np
import pytest
from scipy import special

from hamgen import basis, integrals


def _prim(center, powers, alpha):
    norm = basis._primitive_norm(*powers, alpha)
    return basis.ContractedGaussian(tuple(center), tuple(powers),
                                    (alpha,), (norm,), "prim")


def _random_basis(rng, n=4):
    funcs = []
    for _ in range(n):
        center = rng.uniform(-1.0, 1.0, 3)
        powers = tuple(rng.integers(0, 2, 3))
        alpha = float(rng.uniform(0.2, 2.5))
        funcs.append(_prim(center, powers, alpha))
    return funcs


def test_boys_closed_forms():
    for T in (0.0, 1e-8, 0.3, 2.0, 15.0, 40.0):
        if T == 0.0:
            assert integrals.boys(0, T) == pytest.approx(1.0, abs=1e-14)
            assert integrals.boys(3, T) == pytest.approx(1.0 / 7.0, abs=1e-14)
        else:
            # F0(T) = sqrt(pi/T) erf(sqrt(T)) / 2
            ref = 0.5 * np.sqrt(np.pi / T) * special.erf(np.sqrt(T))
            assert integrals.boys(0, T) == pytest.approx(ref, rel=1e-12)


def test_boys_downward_recursion():
    # F_{m}(T) = (2T F_{m+1}(T) + exp(-T)) / (2m + 1)
    for T in (0.1, 1.0, 7.0):
        for m in range(5):
            lhs = integrals.boys(m, T)
            rhs = (2 * T * integrals.boys(m + 1, T) + np.exp(-T)) / (2 * m + 1)
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_nuclear_attraction_s_gaussian_erf_oracle():
    # normalized s Gaussian at origin, nucleus at distance R:
    # V = -Z erf(sqrt(alpha) R) / R  for the squared density exponent alpha
    for alpha in (0.5, 1.3):
        for R in (0.8, 2.5):
            f = _prim((0, 0, 0), (0, 0, 0), alpha)
            V = integrals.nuclear_matrix([f], [(1, (0.0, 0.0, R))])[0, 0]
            ref = -special.erf(np.sqrt(2 * alpha) * R) / R
            assert V == pytest.approx(ref, rel=1e-12)


def test_overlap_kinetic_quadrature_oracle():
    # numeric triple-product-rule oracle on a grid for two offset primitives
    f1 = _prim((0.0, 0.0, 0.0), (0, 0, 0), 0.9)
    f2 = _prim((0.0, 0.4, 0.7), (0, 0, 1), 0.5)
    n, L = 101, 9.0
    x = np.linspace(-L, L, n)
    dx = x[1] - x[0]
    X, Y, Z = np.meshgrid(x, x, x, indexing="ij")

    def evaluate(f, xs, ys, zs):
        ax, ay, az = f.center
        l, m, p = f.powers
        return f.coefficients[0] * (xs - ax) ** l * (ys - ay) ** m \
            * (zs - az) ** p * np.exp(-f.exponents[0] *
                                      ((xs - ax) ** 2 + (ys - ay) ** 2
                                       + (zs - az) ** 2))

    g1 = evaluate(f1, X, Y, Z)
    g2 = evaluate(f2, X, Y, Z)
    s_num = np.sum(g1 * g2) * dx ** 3
    assert integrals.overlap_matrix([f1, f2])[0, 1] == \
        pytest.approx(s_num, abs=1e-6)

    # the trapezoid mesh is fine for the decaying integrand; the Laplacian
    # needs a much smaller step than the mesh spacing, so take analytic
    # re-evaluations at +-h around each node
    h = 1e-3
    lap = np.zeros_like(g2)
    for shift in ((h, 0, 0), (0, h, 0), (0, 0, h)):
        sx, sy, sz = shift
        lap += (evaluate(f2, X + sx, Y + sy, Z + sz)
                + evaluate(f2, X - sx, Y - sy, Z - sz) - 2 * g2) / h ** 2
    t_num = -0.5 * np.sum(g1 * lap) * dx ** 3
    assert integrals.kinetic_matrix([f1, f2])[0, 1] == \
        pytest.approx(t_num, abs=1e-5)


def test_matrix_symmetries():
    rng = np.random.default_rng(4)
    funcs = _random_basis(rng)
    S = integrals.overlap_matrix(funcs)
    T = integrals.kinetic_matrix(funcs)
    V = integrals.nuclear_matrix(funcs, [(2, (0.3, -0.2, 0.5))])
    for M in (S, T, V):
        np.testing.assert_allclose(M, M.T, atol=1e-13)
    vals = np.linalg.eigvalsh(S)
    assert np.all(vals > 0)


def test_eri_eightfold_symmetry():
    rng = np.random.default_rng(11)
    funcs = _random_basis(rng, n=3)
    g = integrals.eri_tensor(funcs)
    np.testing.assert_allclose(g, g.transpose(1, 0, 2, 3), atol=1e-13)
    np.testing.assert_allclose(g, g.transpose(0, 1, 3, 2), atol=1e-13)
    np.testing.assert_allclose(g, g.transpose(2, 3, 0, 1), atol=1e-13)


def test_eri_same_center_s_oracle():
    # (aa|aa) for a normalized s Gaussian of exponent alpha: 2 sqrt(alpha/pi)
    for alpha in (0.4, 1.0, 2.7):
        f = _prim((0.2, -0.1, 0.3), (0, 0, 0), alpha)
        val = integrals.eri_tensor([f])[0, 0, 0, 0]
        assert val == pytest.approx(2.0 * np.sqrt(alpha / np.pi), rel=1e-12)


def test_nuclear_repulsion():
    charges = [(1, (0.0, 0.0, 0.0)), (3, (0.0, 0.0, 2.0)), (1, (0.0, 1.0, 0.0))]
    e = integrals.nuclear_repulsion(charges)
    ref = 3 / 2.0 + 1 / 1.0 + 3 / np.sqrt(1.0 + 4.0)
    assert e == pytest.approx(ref, rel=1e-14)
