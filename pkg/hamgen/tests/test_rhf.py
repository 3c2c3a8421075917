"""SCF against literature references and frame-invariance properties."""

import numpy as np
import pytest

from hamgen.basis import ANGSTROM_TO_BOHR
from hamgen.scf import SCFError, run_rhf


def _h2(r_angstrom, basis):
    r = r_angstrom * ANGSTROM_TO_BOHR
    return run_rhf([("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, r))], basis)


def test_h2_sto3g_literature():
    # Szabo & Ostlund give -1.1167 Ha for H2/STO-3G near equilibrium
    res = _h2(0.74, "STO-3G")
    assert res.energy == pytest.approx(-1.1167, abs=5e-4)
    assert res.n_electrons == 2


def test_h2_sto6g_below_sto3g():
    # larger contraction is variationally lower at the same geometry
    e3 = _h2(0.74, "STO-3G").energy
    e6 = _h2(0.74, "STO-6G").energy
    assert e6 < e3


def test_he_atom_sto3g():
    # He/STO-3G RHF is about -2.808 Ha (HF limit -2.8617)
    res = run_rhf([("He", (0.0, 0.0, 0.0))], "STO-3G")
    assert res.energy == pytest.approx(-2.808, abs=1e-2)
    assert res.energy > -2.8617


def test_mo_orthonormality():
    res = _h2(0.9, "STO-3G")
    C, S = res.mo_coefficients, res.overlap
    np.testing.assert_allclose(C.T @ S @ C, np.eye(C.shape[1]), atol=1e-10)


def test_energy_frame_invariance():
    res0 = _h2(0.8, "STO-3G")
    # same molecule, rotated and shifted
    rng = np.random.default_rng(2)
    q, r_mat = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r_mat)))
    r = 0.8 * ANGSTROM_TO_BOHR
    coords = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, r]]) @ q.T + [1.0, -2.0, 0.5]
    res1 = run_rhf([("H", tuple(coords[0])), ("H", tuple(coords[1]))], "STO-3G")
    assert res1.energy == pytest.approx(res0.energy, abs=1e-9)


def test_open_shell_rejected():
    with pytest.raises(SCFError, match="open shell"):
        run_rhf([("H", (0.0, 0.0, 0.0))], "STO-3G")


def test_cation_charge_handling():
    # H2+ has one electron: rejected; He2(2+) closed shell converges
    with pytest.raises(SCFError):
        _h2_plus = run_rhf([("H", (0, 0, 0)), ("H", (0, 0, 1.4))],
                           "STO-3G", charge=1)
    res = run_rhf([("He", (0, 0, 0)), ("He", (0, 0, 4.0))],
                  "STO-3G", charge=2)
    assert res.n_electrons == 2
