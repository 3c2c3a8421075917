"""Bundle generation: geometry in, self-checked interchange document out.

The emitted JSON matches the consumer's Hamiltonian interchange schema:
format_version 1, little-endian qubit indexing, interleaved alpha/beta spin
ordering (qubit 2i = alpha of spatial orbital i).  Orbitals are canonical
restricted HF orbitals; reference energies (hf, fci) are invariant under
this choice even though optimal-parameter labels are not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__, fci, fermion
from .basis import ANGSTROM_TO_BOHR, SUPPORTED_BASES, BasisError
from .scf import SCFError, run_rhf

SELF_CHECK_TOL = 1e-8


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class MoleculeRequest:
    name: str
    geometry: tuple                       # ((element, (x, y, z) Angstrom), ...)
    basis: str = "STO-6G"
    charge: int = 0
    spin_multiplicity: int = 1

    def __post_init__(self):
        if self.basis not in SUPPORTED_BASES:
            raise BasisError(
                f"unsupported basis {self.basis!r}; supported: {SUPPORTED_BASES}")
        if self.spin_multiplicity != 1:
            raise GenerationError("only singlets are supported")
        geom = tuple((el, tuple(float(x) for x in xyz))
                     for el, xyz in self.geometry)
        object.__setattr__(self, "geometry", geom)


@dataclass(frozen=True)
class GeneratedBundle:
    request: MoleculeRequest
    document: str                 # interchange JSON text
    provenance: dict = field(compare=False)
    hf_energy: float = 0.0
    fci_energy: float = 0.0
    n_qubits: int = 0

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.document)


def _atoms_bohr(request: MoleculeRequest):
    return [(el, tuple(x * ANGSTROM_TO_BOHR for x in xyz))
            for el, xyz in request.geometry]


def generate(request: MoleculeRequest) -> GeneratedBundle:
    """Full pipeline: RHF, spin-orbital integrals, Jordan-Wigner, exact
    diagonalization, then self-checks before the document is assembled.
    """
    res = run_rhf(_atoms_bohr(request), request.basis, charge=request.charge)
    h_mo, g_mo = fermion.mo_integrals(res)
    h_so, g_so = fermion.spin_orbital_integrals(h_mo, g_mo)
    n_qubits = h_so.shape[0]
    if n_qubits > fci.QUBIT_CAP:
        raise GenerationError(
            f"{request.name}: {n_qubits} qubits exceeds the "
            f"exact-diagonalization cap of {fci.QUBIT_CAP}")
    terms = fermion.jordan_wigner(h_so, g_so, res.e_nuclear)

    hf_bits = [1 if p < res.n_electrons else 0 for p in range(n_qubits)]
    e_fci = fci.ground_energy(terms, n_qubits)

    # pre-emission self-checks: the diagonal matrix element at the HF
    # bitstring must reproduce the SCF energy, and the recorded fci must be
    # the actual lowest eigenvalue of the emitted operator
    e_diag = fci.diagonal_energy(terms, n_qubits, hf_bits)
    if abs(e_diag - res.energy) > SELF_CHECK_TOL:
        raise GenerationError(
            f"{request.name}: HF bitstring energy {e_diag:.10f} disagrees "
            f"with SCF energy {res.energy:.10f}")
    e_sector = fci.sector_ground_energy(terms, n_qubits, res.n_electrons)
    if e_sector < e_fci - SELF_CHECK_TOL:
        raise GenerationError(
            f"{request.name}: sector energy below full-space minimum")

    n_spatial = n_qubits // 2
    # contiguous spin-orbital block per atom, in atom order; minimal basis
    # means the block sizes follow the per-atom shell counts
    blocks = []
    offset = 0
    for el, _ in request.geometry:
        n_funcs = 1 if el in ("H", "He") else 5
        blocks.append(list(range(2 * offset, 2 * (offset + n_funcs))))
        offset += n_funcs
    assert offset == n_spatial

    doc = {
        "format_version": 1,
        "n_qubits": n_qubits,
        "source": (f"{request.name} {request.basis} RHF/JW "
                   "interleaved alpha-beta, little-endian"),
        "terms": [{"c": float(c), "p": " ".join(
                      f"{p}{q}" for q, p in enumerate(label) if p != "I")}
                  for label, c in sorted(terms.items())],
        "geometry": [{"element": el, "xyz": list(xyz)}
                     for el, xyz in request.geometry],
        "hf_bitstring": hf_bits,
        "energies": {"hf": float(res.energy), "fci": float(e_fci)},
        "atom_qubit_map": blocks,
    }
    provenance = {
        "generator": f"hamgen {__version__}",
        "basis": request.basis,
        "scf_iterations": res.iterations,
        "scf_energy": float(res.energy),
        "fci_energy": float(e_fci),
        "fci_sector_energy": float(e_sector),
        "n_terms": len(doc["terms"]),
    }
    return GeneratedBundle(request=request,
                           document=json.dumps(doc, indent=1),
                           provenance=provenance,
                           hf_energy=float(res.energy),
                           fci_energy=float(e_fci),
                           n_qubits=n_qubits)


def generate_scan(build_request, grid):
    """One bundle per grid value; failures are collected, not fatal.

    build_request maps a bond length (Angstrom) to a MoleculeRequest.
    Returns (bundles, failures) with failures as (value, message) pairs.
    """
    grid = list(grid)
    if not grid:
        raise GenerationError("empty bond-length grid")
    bundles, failures = [], []
    for value in grid:
        try:
            bundles.append(generate(build_request(float(value))))
        except (SCFError, GenerationError, BasisError) as e:
            failures.append((float(value), str(e)))
    return bundles, failures


def diatomic_request(name: str, elements, r: float,
                     basis: str = "STO-6G") -> MoleculeRequest:
    return MoleculeRequest(name=f"{name} r={r:.4f}A", basis=basis,
                           geometry=((elements[0], (0.0, 0.0, 0.0)),
                                     (elements[1], (0.0, 0.0, r))))


def h_chain_request(n_atoms: int, spacing: float,
                    basis: str = "STO-6G") -> MoleculeRequest:
    geom = tuple(("H", (0.0, 0.0, i * spacing)) for i in range(n_atoms))
    return MoleculeRequest(name=f"H{n_atoms} r={spacing:.4f}A",
                           basis=basis, geometry=geom)


def rotated_h4_dataset(n_samples: int, stretch_range, seed: int):
    """Randomly rotated and stretched H4 chains, STO-3G.

    Returns (bundles, labels) where labels[i] is the fci energy of sample i.
    Spacings are drawn on an even grid over stretch_range so both range
    edges appear exactly once; orientations are Haar-random rotations with
    a uniform center offset.
    """
    if n_samples < 1:
        raise GenerationError("n_samples must be >= 1")
    lo, hi = float(stretch_range[0]), float(stretch_range[1])
    spacings = np.linspace(lo, hi, n_samples) if n_samples > 1 \
        else np.array([lo])
    rng = np.random.default_rng(seed)

    bundles, labels = [], []
    for i, spacing in enumerate(spacings):
        base = np.array([[0.0, 0.0, k * spacing] for k in range(4)])
        # QR of a Gaussian matrix, sign-fixed: Haar-distributed rotation
        q, r_mat = np.linalg.qr(rng.normal(size=(3, 3)))
        q = q @ np.diag(np.sign(np.diag(r_mat)))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        shift = rng.uniform(-1.0, 1.0, size=3)
        coords = base @ q.T + shift
        geom = tuple(("H", tuple(row)) for row in coords)
        req = MoleculeRequest(name=f"H4 rotated sample {i} "
                                   f"spacing={spacing:.4f}A",
                              basis="STO-3G", geometry=geom)
        bundle = generate(req)
        bundles.append(bundle)
        labels.append(bundle.fci_energy)
    return bundles, labels
