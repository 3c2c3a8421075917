"""Pauli-string Hamiltonians: algebra, interchange format, exact spectra.

Conventions: qubit 0 is the least significant bit of basis-state indices
(little-endian).  Coefficients are real (Hartree), so Hermiticity is automatic.
Statevectors are complex numpy arrays of length 2**n_qubits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_QUBIT_CAP = 10      # dense diagonalization up to here
QUBIT_CAP = 14            # hard cap for any dense-vector operation

_PAULIS = ("X", "Y", "Z")


class HamiltonianParseError(ValueError):
    """Malformed interchange document."""


class HamiltonianValidationError(ValueError):
    """Structurally valid document violating a Hamiltonian invariant."""


@dataclass(frozen=True)
class PauliTerm:
    """A real coefficient times a product of single-qubit Paulis.

    `factors` maps qubit index -> 'X' | 'Y' | 'Z'; identity factors are
    implicit.  Immutable; the factor dict must not be mutated after creation.
    """

    coefficient: float
    factors: dict[int, str]

    def __post_init__(self):
        if not math.isfinite(self.coefficient):
            raise HamiltonianValidationError("non-finite coefficient")
        for q, p in self.factors.items():
            if not isinstance(q, int) or q < 0:
                raise HamiltonianValidationError(f"bad qubit index {q!r}")
            if p not in _PAULIS:
                raise HamiltonianValidationError(f"bad Pauli letter {p!r}")

    def pauli_string(self) -> str:
        """Render as e.g. 'X0 Z3'; empty string for the identity."""
        return " ".join(f"{p}{q}" for q, p in sorted(self.factors.items()))


@dataclass(frozen=True)
class QubitHamiltonian:
    n_qubits: int
    terms: tuple[PauliTerm, ...]
    source: str = ""
    geometry: object | None = None          # geometry.MolecularGeometry, if any
    reference_energies: dict = field(default_factory=dict)  # {'hf':..,'fci':..}
    hf_bitstring: tuple[int, ...] | None = None
    atom_qubit_map: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise HamiltonianValidationError("n_qubits must be positive")
        if not self.terms:
            raise HamiltonianValidationError("terms list is empty")
        for t in self.terms:
            for q in t.factors:
                if q >= self.n_qubits:
                    raise HamiltonianValidationError(
                        f"term acts on qubit {q} but n_qubits={self.n_qubits}")
        if self.hf_bitstring is not None and len(self.hf_bitstring) != self.n_qubits:
            raise HamiltonianValidationError("hf_bitstring length mismatch")

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits


# ---------------------------------------------------------------------------
# interchange documents (JSON)

def _parse_pauli_string(s: str, n_qubits: int) -> dict[int, str]:
    factors: dict[int, str] = {}
    if s.strip() == "":
        return factors
    for token in s.split():
        letter, idx = token[0], token[1:]
        if letter not in _PAULIS or not idx.isdigit():
            raise HamiltonianParseError(f"bad Pauli token {token!r} in key 'p'")
        q = int(idx)
        if q in factors:
            raise HamiltonianParseError(f"qubit {q} repeated in key 'p'")
        factors[q] = letter
    return factors


def parse_hamiltonian(document: str) -> QubitHamiltonian:
    """Parse an interchange document (JSON text) into a QubitHamiltonian.

    Term order is preserved.  Raises HamiltonianParseError naming the
    offending key for schema problems, HamiltonianValidationError for
    out-of-range qubit indices.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise HamiltonianParseError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise HamiltonianParseError("top level must be an object")
    if doc.get("format_version") != 1:
        raise HamiltonianParseError("key 'format_version' must equal 1")
    try:
        n_qubits = int(doc["n_qubits"])
    except (KeyError, TypeError, ValueError):
        raise HamiltonianParseError("key 'n_qubits' missing or not an int") from None
    raw_terms = doc.get("terms")
    if not isinstance(raw_terms, list) or not raw_terms:
        raise HamiltonianParseError("key 'terms' must be a non-empty list")

    terms = []
    for i, rt in enumerate(raw_terms):
        if not isinstance(rt, dict) or "c" not in rt or "p" not in rt:
            raise HamiltonianParseError(f"terms[{i}] needs keys 'c' and 'p'")
        try:
            c = float(rt["c"])
        except (TypeError, ValueError):
            raise HamiltonianParseError(f"terms[{i}] key 'c' not a number") from None
        terms.append(PauliTerm(c, _parse_pauli_string(str(rt["p"]), n_qubits)))

    geometry = None
    if doc.get("geometry") is not None:
        from . import geometry as geom_mod
        try:
            geometry = geom_mod.MolecularGeometry(
                [(a["element"], np.asarray(a["xyz"], dtype=float)) for a in doc["geometry"]])
        except (KeyError, TypeError) as e:
            raise HamiltonianParseError(f"key 'geometry' malformed: {e}") from None

    hf_bits = None
    if doc.get("hf_bitstring") is not None:
        hf_bits = tuple(int(b) for b in doc["hf_bitstring"])
        if any(b not in (0, 1) for b in hf_bits):
            raise HamiltonianParseError("key 'hf_bitstring' must be 0/1 list")

    energies = {}
    if doc.get("energies") is not None:
        if not isinstance(doc["energies"], dict):
            raise HamiltonianParseError("key 'energies' must be an object")
        for k in ("hf", "fci"):
            if doc["energies"].get(k) is not None:
                energies[k] = float(doc["energies"][k])

    aqm = None
    if doc.get("atom_qubit_map") is not None:
        aqm = tuple(tuple(int(q) for q in block) for block in doc["atom_qubit_map"])

    return QubitHamiltonian(
        n_qubits=n_qubits,
        terms=tuple(terms),
        source=str(doc.get("source", "")),
        geometry=geometry,
        reference_energies=energies,
        hf_bitstring=hf_bits,
        atom_qubit_map=aqm,
    )


def serialize_hamiltonian(H: QubitHamiltonian) -> str:
    """Inverse of parse_hamiltonian; numeric fields survive at full precision."""
    doc: dict = {
        "format_version": 1,
        "n_qubits": H.n_qubits,
        "source": H.source,
        "terms": [{"c": t.coefficient, "p": t.pauli_string()} for t in H.terms],
    }
    if H.geometry is not None:
        doc["geometry"] = [
            {"element": el, "xyz": [float(x) for x in pos]}
            for el, pos in H.geometry.atoms]
    if H.hf_bitstring is not None:
        doc["hf_bitstring"] = list(H.hf_bitstring)
    if H.reference_energies:
        doc["energies"] = dict(H.reference_energies)
    if H.atom_qubit_map is not None:
        doc["atom_qubit_map"] = [list(b) for b in H.atom_qubit_map]
    return json.dumps(doc, indent=1)


# ---------------------------------------------------------------------------
# dense-vector kernels

def _apply_term(term: PauliTerm, psi: np.ndarray, n: int) -> np.ndarray:
    """coefficient * (Pauli product) applied to psi (fresh array)."""
    out = np.array(psi, dtype=complex).reshape((2,) * n)
    for q, p in term.factors.items():
        ax = n - 1 - q   # qubit 0 = least significant bit = last axis
        v = np.moveaxis(out, ax, 0)
        if p == "X":
            v[[0, 1]] = v[[1, 0]]
        elif p == "Y":
            v[[0, 1]] = v[[1, 0]]
            v[0] *= -1j
            v[1] *= 1j
        else:  # Z
            v[1] *= -1
    out = out.reshape(-1)
    out *= term.coefficient
    return out


def apply_hamiltonian(H: QubitHamiltonian, psi: np.ndarray) -> np.ndarray:
    """Return H @ psi as a fresh vector; psi is untouched."""
    psi = np.asarray(psi)
    if psi.shape != (H.dim,):
        raise ValueError(f"state dimension {psi.shape} != ({H.dim},)")
    acc = np.zeros(H.dim, dtype=complex)
    for t in H.terms:
        acc += _apply_term(t, psi, H.n_qubits)
    return acc


def _check_normalized(psi: np.ndarray, tol: float = 1e-10):
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state not normalized: |psi| = {nrm!r}")


def expectation(H: QubitHamiltonian, psi: np.ndarray) -> float:
    """<psi|H|psi> as a real number (imaginary residue checked internally)."""
    psi = np.asarray(psi, dtype=complex)
    _check_normalized(psi)
    val = np.vdot(psi, apply_hamiltonian(H, psi))
    assert abs(val.imag) < 1e-10, f"imaginary expectation residue {val.imag}"
    return float(val.real)


def hamiltonian_variance(H: QubitHamiltonian, psi: np.ndarray) -> float:
    """<H^2> - <H>^2, clamped at zero."""
    psi = np.asarray(psi, dtype=complex)
    _check_normalized(psi)
    hpsi = apply_hamiltonian(H, psi)
    e = np.vdot(psi, hpsi).real
    e2 = np.vdot(hpsi, hpsi).real
    return max(e2 - e * e, 0.0)


def basis_state_energy(H: QubitHamiltonian, bits) -> float:
    """<bits|H|bits>; only all-Z terms contribute, with parity signs."""
    bits = list(bits)
    if len(bits) != H.n_qubits:
        raise ValueError("bitstring length mismatch")
    total = 0.0
    for t in H.terms:
        if any(p != "Z" for p in t.factors.values()):
            continue
        sign = 1.0
        for q in t.factors:
            if bits[q]:
                sign = -sign
        total += sign * t.coefficient
    return total


# ---------------------------------------------------------------------------
# exact spectra

_PAULI_MATS = {
    "X": sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex)),
    "Y": sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex)),
    "Z": sp.csr_matrix(np.array([[1, 0], [0, -1]], dtype=complex)),
}


def to_sparse(H: QubitHamiltonian) -> sp.csr_matrix:
    """Sparse matrix of H in the computational basis (little-endian)."""
    eye = sp.identity(2, dtype=complex, format="csr")
    acc = sp.csr_matrix((H.dim, H.dim), dtype=complex)
    for t in H.terms:
        # kron with the highest qubit leftmost so qubit 0 is the LSB
        m = None
        for q in range(H.n_qubits - 1, -1, -1):
            f = _PAULI_MATS.get(t.factors.get(q), eye)
            if t.factors.get(q) is None:
                f = eye
            m = f if m is None else sp.kron(m, f, format="csr")
        acc = acc + t.coefficient * m
    return acc.tocsr()


@dataclass(frozen=True)
class SpectrumResult:
    ground_energy: float
    ground_state: np.ndarray
    gap: float | None = None


def _fix_phase(psi: np.ndarray) -> np.ndarray:
    """Make the first nonzero amplitude real positive."""
    idx = np.flatnonzero(np.abs(psi) > 1e-12)
    if idx.size == 0:
        return psi
    ph = psi[idx[0]] / abs(psi[idx[0]])
    return psi / ph


def exact_ground_state(H: QubitHamiltonian, *, maxiter: int = 10000) -> SpectrumResult:
    """Lowest eigenpair; dense for n <= DENSE_QUBIT_CAP, Lanczos above."""
    if H.n_qubits > QUBIT_CAP:
        raise ValueError(f"n_qubits={H.n_qubits} exceeds cap {QUBIT_CAP}")
    mat = to_sparse(H)
    if H.n_qubits <= DENSE_QUBIT_CAP:
        w, v = np.linalg.eigh(mat.toarray())
        e0, psi = w[0], v[:, 0]
        gap = float(w[1] - w[0]) if len(w) > 1 else None
    else:
        k = min(2, H.dim - 1)
        w, v = spla.eigsh(mat, k=k, which="SA", maxiter=maxiter)
        order = np.argsort(w)
        w, v = w[order], v[:, order]
        e0, psi = w[0], v[:, 0]
        gap = float(w[1] - w[0]) if k > 1 else None
    psi = _fix_phase(np.asarray(psi, dtype=complex))
    psi = psi / np.linalg.norm(psi)
    return SpectrumResult(float(e0), psi, gap)


# ---------------------------------------------------------------------------
# geometry-parameterized spin-chain surrogate

@dataclass(frozen=True)
class ChainModelParams:
    """Heisenberg couplings decaying exponentially with interatomic distance."""
    J0: float = 1.0
    r0: float = 1.0       # Angstrom
    xi: float = 1.0       # Angstrom, decay length
    h: float = 0.25       # uniform Z field
    r_cut: float = 1.5    # Angstrom neighbor cutoff


def build_chain_model(geom, params: ChainModelParams) -> QubitHamiltonian:
    """H = sum_edges J_ij (XX + YY + ZZ) + h sum_i Z_i over the cutoff graph.

    J_ij = J0 * exp(-(r_ij - r0)/xi).  Depends on interatomic distances only,
    so any rigid motion of the geometry yields a term-identical Hamiltonian.
    """
    from . import geometry as geom_mod
    if len(geom.atoms) == 0:
        raise ValueError("empty geometry")
    if params.xi <= 0:
        raise ValueError("xi must be positive")
    elems = {el for el, _ in geom.atoms}
    if len(elems) > 1:
        raise ValueError("chain model expects a single element species")
    edges = geom_mod.neighbor_graph(geom, params.r_cut)
    n = len(geom.atoms)
    terms = []
    for (i, j) in edges:
        r = float(np.linalg.norm(geom.positions[i] - geom.positions[j]))
        J = params.J0 * math.exp(-(r - params.r0) / params.xi)
        for p in _PAULIS:
            terms.append(PauliTerm(J, {i: p, j: p}))
    if params.h != 0.0:
        for i in range(n):
            terms.append(PauliTerm(params.h, {i: "Z"}))
    if not terms:
        # disconnected geometry with zero field still needs a valid operator
        terms = [PauliTerm(0.0, {0: "Z"})]
    return QubitHamiltonian(n_qubits=n, terms=tuple(terms), source="chain-model")
