"""Jordan-Wigner mapping and exact-diagonalization cross-checks."""

import numpy as np
import pytest

from hamgen import fci, fermion


def _dense(terms, n):
    return fci.pauli_terms_to_sparse(terms, n).toarray()


def test_ladder_anticommutation():
    # {a_p, a_q+} = delta_pq, {a_p, a_q} = 0, on 3 modes
    n = 3
    a = [_dense(fermion._ladder(p, n, False), n) for p in range(n)]
    ad = [_dense(fermion._ladder(p, n, True), n) for p in range(n)]
    eye = np.eye(2 ** n)
    for p in range(n):
        for q in range(n):
            anti = a[p] @ ad[q] + ad[q] @ a[p]
            np.testing.assert_allclose(anti, (p == q) * eye, atol=1e-13)
            np.testing.assert_allclose(a[p] @ a[q] + a[q] @ a[p],
                                       0 * eye, atol=1e-13)


def test_number_operator_image():
    # a_p+ a_p -> (I - Z_p)/2
    n = 3
    for p in range(n):
        prod = fermion._multiply(fermion._ladder(p, n, True),
                                 fermion._ladder(p, n, False), n)
        expect_z = tuple("Z" if q == p else "I" for q in range(n))
        eye = tuple(["I"] * n)
        assert prod[eye] == pytest.approx(0.5)
        assert prod[expect_z] == pytest.approx(-0.5)
        assert len(prod) == 2


def test_multiply_matches_matrix_product():
    rng = np.random.default_rng(5)
    n = 3
    letters = np.array(["I", "X", "Y", "Z"])
    for _ in range(20):
        t1 = {tuple(rng.choice(letters, n)): complex(rng.normal(), rng.normal())}
        t2 = {tuple(rng.choice(letters, n)): complex(rng.normal(), rng.normal())}
        prod = fermion._multiply(t1, t2, n)
        np.testing.assert_allclose(_dense(prod, n),
                                   _dense(t1, n) @ _dense(t2, n), atol=1e-13)


def test_jordan_wigner_matches_dense_fock_operator():
    """Random Hermitian one- and two-body coefficients: the JW image must
    equal the operator assembled directly from dense ladder matrices.
    """
    rng = np.random.default_rng(9)
    n = 4
    h = rng.normal(size=(n, n))
    h = 0.5 * (h + h.T)
    g = rng.normal(size=(n, n, n, n))
    # physicists' symmetries: <pq|rs> = <qp|sr> and real-orbital hermiticity
    g = 0.5 * (g + g.transpose(1, 0, 3, 2))
    g = 0.5 * (g + g.transpose(2, 3, 0, 1))
    e0 = 0.7

    terms = fermion.jordan_wigner(h, g, e0)
    built = _dense(terms, n)

    a = [_dense(fermion._ladder(p, n, False), n) for p in range(n)]
    ad = [_dense(fermion._ladder(p, n, True), n) for p in range(n)]
    ref = e0 * np.eye(2 ** n, dtype=complex)
    for p in range(n):
        for q in range(n):
            ref += h[p, q] * ad[p] @ a[q]
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    ref += 0.5 * g[p, q, r, s] * ad[p] @ ad[q] @ a[s] @ a[r]
    np.testing.assert_allclose(built, ref, atol=1e-10)


def test_spin_orbital_expansion_blocks():
    h_mo = np.array([[1.0, 0.2], [0.2, 2.0]])
    g_mo = np.random.default_rng(0).normal(size=(2, 2, 2, 2))
    h_so, g_so = fermion.spin_orbital_integrals(h_mo, g_mo)
    assert h_so.shape == (4, 4)
    # alpha of orbital 0 is qubit 0, beta qubit 1; no spin mixing
    assert h_so[0, 0] == h_mo[0, 0] and h_so[1, 1] == h_mo[0, 0]
    assert h_so[0, 2] == h_mo[0, 1] and h_so[0, 1] == 0.0
    # <pq|rs> nonzero only when spin(p)=spin(r), spin(q)=spin(s)
    assert g_so[0, 1, 0, 1] == g_mo[0, 0, 0, 0]
    assert g_so[0, 1, 1, 0] == 0.0


def test_sparse_builder_little_endian():
    # Z on qubit 0 must act on the least significant bit
    n = 2
    mat = _dense({("Z", "I"): 1.0}, n)
    np.testing.assert_allclose(np.diag(mat), [1, -1, 1, -1])
    mat1 = _dense({("I", "Z"): 1.0}, n)
    np.testing.assert_allclose(np.diag(mat1), [1, 1, -1, -1])


def test_dimension_guard():
    with pytest.raises(ValueError, match="cap"):
        fci.pauli_terms_to_sparse({tuple(["I"] * 15): 1.0}, 15)


def test_diagonal_energy_matches_dense():
    rng = np.random.default_rng(3)
    n = 3
    letters = np.array(["I", "Z", "X", "Y"])
    terms = {tuple(rng.choice(letters, n, p=[0.4, 0.4, 0.1, 0.1])):
             float(rng.normal()) for _ in range(8)}
    mat = _dense(terms, n)
    for b in range(2 ** n):
        bits = [(b >> i) & 1 for i in range(n)]
        assert fci.diagonal_energy(terms, n, bits) == \
            pytest.approx(mat[b, b].real, abs=1e-12)


def test_sector_ground_energy():
    # number-conserving operator: full-space minimum equals the best sector
    n = 4
    terms = {}
    for p in range(n):
        z = tuple("Z" if q == p else "I" for q in range(n))
        terms[z] = -0.5 * (p + 1)
    best = min(fci.sector_ground_energy(terms, n, k) for k in range(n + 1))
    assert fci.ground_energy(terms, n) == pytest.approx(best, abs=1e-12)
