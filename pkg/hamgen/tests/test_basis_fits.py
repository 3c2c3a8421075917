"""Contraction-fit quality and normalization of the generated basis."""

import numpy as np
import pytest

from hamgen import basis, integrals


def _rayleigh_hydrogen(n_prim):
    """Variational energy of a hydrogen atom in a single fitted 1s contraction
    with unit Slater exponent.  Exact ground state is -0.5 Ha; the fit can
    only approach it from above.
    """
    alphas, coefs = basis._fit_expansion(n_prim, 1, 0)
    funcs = [basis.ContractedGaussian(
        (0.0, 0.0, 0.0), (0, 0, 0), alphas,
        tuple(c * basis._primitive_norm(0, 0, 0, a)
              for c, a in zip(coefs, alphas)), "H 1s")]
    S = integrals.overlap_matrix(funcs)
    T = integrals.kinetic_matrix(funcs)
    V = integrals.nuclear_matrix(funcs, [(1, (0.0, 0.0, 0.0))])
    return float((T + V)[0, 0] / S[0, 0])


def test_hydrogen_variational_sto3g():
    e = _rayleigh_hydrogen(3)
    assert e > -0.5
    assert e == pytest.approx(-0.5, abs=5e-2)


def test_hydrogen_variational_sto6g():
    e = _rayleigh_hydrogen(6)
    assert e > -0.5
    # six primitives track the Slater cusp closely
    assert e == pytest.approx(-0.5, abs=2e-3)


def test_fit_overlaps_high():
    for n_prim in (3, 6):
        for n_quantum, l in ((1, 0), (2, 0), (2, 1)):
            alphas, coefs = basis._fit_expansion(n_prim, n_quantum, l)
            assert len(alphas) == n_prim
            assert all(a > 0 for a in alphas)
            # exponents sorted descending, no near-duplicates
            assert all(a1 > a2 * 1.001 for a1, a2 in zip(alphas, alphas[1:]))


def test_contracted_functions_normalized():
    funcs = basis.build_basis([("H", (0.0, 0.0, 0.0)),
                               ("Li", (0.0, 0.0, 3.0))], "STO-3G")
    S = integrals.overlap_matrix(funcs)
    np.testing.assert_allclose(np.diag(S), 1.0, atol=5e-7)


def test_lithium_shell_layout():
    funcs = basis.build_basis([("Li", (0.0, 0.0, 0.0))], "STO-3G")
    assert [f.label for f in funcs] == \
        ["Li 1s", "Li 2s", "Li 2px", "Li 2py", "Li 2pz"]


def test_unsupported_inputs():
    with pytest.raises(basis.BasisError):
        basis.build_basis([("H", (0, 0, 0))], "6-31G")
    with pytest.raises(basis.BasisError):
        basis.build_basis([("C", (0, 0, 0))], "STO-3G")
