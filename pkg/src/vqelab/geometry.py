"""Molecular geometries, SE(3) actions, disorder sampling, invariant features.

All features are built from interatomic distances and angles, so invariance
under rigid motions is exact by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MIN_ATOM_SEPARATION = 1e-6  # Angstrom

# enough of the periodic table for the systems handled here
ATOMIC_NUMBERS = {
    "H": 1, "He": 2, "Li": 3, "Be": 4, "B": 5, "C": 6, "N": 7, "O": 8,
    "F": 9, "Ne": 10, "Na": 11, "Mg": 12,
}


class GeometryError(ValueError):
    pass


class MolecularGeometry:
    """Ordered list of (element symbol, position [Angstrom]) pairs."""

    def __init__(self, atoms):
        self.atoms = [(str(el), np.array(pos, dtype=float)) for el, pos in atoms]
        if not self.atoms:
            raise GeometryError("at least one atom required")
        self.positions = np.array([p for _, p in self.atoms])
        self.elements = [el for el, _ in self.atoms]
        if self.positions.shape[1] != 3 or not np.all(np.isfinite(self.positions)):
            raise GeometryError("positions must be finite 3-vectors")
        n = len(self.atoms)
        for i in range(n):
            for j in range(i + 1, n):
                if np.linalg.norm(self.positions[i] - self.positions[j]) < MIN_ATOM_SEPARATION:
                    raise GeometryError(f"atoms {i} and {j} closer than {MIN_ATOM_SEPARATION} A")

    def __len__(self):
        return len(self.atoms)

    def __eq__(self, other):
        return (isinstance(other, MolecularGeometry)
                and self.elements == other.elements
                and np.array_equal(self.positions, other.positions))

    def distance(self, i: int, j: int) -> float:
        return float(np.linalg.norm(self.positions[i] - self.positions[j]))


def linear_chain(element: str, n: int, spacing: float) -> MolecularGeometry:
    """n atoms of one species on the x axis, uniform spacing in Angstrom."""
    return MolecularGeometry([(element, (i * spacing, 0.0, 0.0)) for i in range(n)])


def read_xyz(text: str) -> MolecularGeometry:
    """Parse standard XYZ text (count line, comment line, element x y z rows)."""
    lines = text.strip().splitlines()
    try:
        n = int(lines[0].strip())
    except (IndexError, ValueError):
        raise GeometryError("first XYZ line must be the atom count") from None
    atoms = []
    for ln in lines[2:2 + n]:
        parts = ln.split()
        atoms.append((parts[0], [float(x) for x in parts[1:4]]))
    if len(atoms) != n:
        raise GeometryError(f"expected {n} atom rows, found {len(atoms)}")
    return MolecularGeometry(atoms)


def write_xyz(geom: MolecularGeometry, comment: str = "") -> str:
    rows = [str(len(geom)), comment.replace("\n", " ")]
    for el, pos in geom.atoms:
        rows.append(f"{el} {pos[0]:.12f} {pos[1]:.12f} {pos[2]:.12f}")
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# SE(3)

@dataclass(frozen=True)
class RigidMotion:
    rotation: np.ndarray      # 3x3, orthonormal, det +1
    translation: np.ndarray   # 3-vector, Angstrom

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=float)
        t = np.asarray(self.translation, dtype=float)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)
        if R.shape != (3, 3) or t.shape != (3,):
            raise GeometryError("rotation must be 3x3, translation a 3-vector")
        if np.max(np.abs(R.T @ R - np.eye(3))) > 1e-12:
            raise GeometryError("rotation matrix not orthonormal")
        if abs(np.linalg.det(R) - 1.0) > 1e-12:
            raise GeometryError("rotation must be proper (det +1)")


IDENTITY_MOTION = RigidMotion(np.eye(3), np.zeros(3))


def apply_rigid_motion(geom: MolecularGeometry, g: RigidMotion) -> MolecularGeometry:
    """r -> R r + t for every atom; element order preserved."""
    new = (g.rotation @ geom.positions.T).T + g.translation
    return MolecularGeometry(list(zip(geom.elements, new)))


def random_rigid_motion(seed: int) -> RigidMotion:
    """Rotation uniform on SO(3) (normalized quaternion), translation in [-5,5]^3."""
    rng = np.random.default_rng(seed)
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    R = np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])
    # re-orthonormalize so the invariant check holds at 1e-12
    u, _, vt = np.linalg.svd(R)
    R = u @ vt
    if np.linalg.det(R) < 0:
        u[:, -1] *= -1
        R = u @ vt
    t = rng.uniform(-5.0, 5.0, size=3)
    return RigidMotion(R, t)


def perturb_positions(geom: MolecularGeometry, sigma_pos: float, seed: int,
                      max_resample: int = 100) -> MolecularGeometry:
    """Add iid Normal(0, sigma_pos^2) per coordinate; resample on clashes."""
    if sigma_pos < 0:
        raise GeometryError("sigma_pos must be nonnegative")
    if sigma_pos == 0:
        return MolecularGeometry(geom.atoms)
    rng = np.random.default_rng(seed)
    for _ in range(max_resample):
        noise = rng.normal(0.0, sigma_pos, size=geom.positions.shape)
        try:
            return MolecularGeometry(list(zip(geom.elements, geom.positions + noise)))
        except GeometryError:
            continue
    raise GeometryError(f"could not perturb without clashes in {max_resample} tries")


# ---------------------------------------------------------------------------
# neighbor graph and invariant features

def neighbor_graph(geom: MolecularGeometry, r_cut: float) -> list[tuple[int, int]]:
    """Undirected edges (i < j) with r_ij < r_cut, lexicographically sorted."""
    if r_cut <= 0:
        raise GeometryError("r_cut must be positive")
    edges = []
    n = len(geom)
    for i in range(n):
        for j in range(i + 1, n):
            if geom.distance(i, j) < r_cut:
                edges.append((i, j))
    return edges


@dataclass(frozen=True)
class FeatureConfig:
    r_cut: float = 5.0
    n_radial: int = 8
    radial_width: float | None = None   # default r_cut / n_radial
    include_three_body: bool = True
    n_angular: int = 4

    def __post_init__(self):
        if self.r_cut <= 0:
            raise GeometryError("r_cut must be positive")
        if self.n_radial < 1:
            raise GeometryError("n_radial must be >= 1")

    @property
    def width(self) -> float:
        return self.radial_width if self.radial_width is not None else self.r_cut / self.n_radial

    @property
    def centers(self) -> np.ndarray:
        # mu_m evenly spaced on (0, r_cut]
        return self.r_cut * (np.arange(self.n_radial) + 1) / self.n_radial


def element_vocabulary(geoms) -> list[str]:
    """Element symbols present in a dataset, ordered by atomic number."""
    seen = set()
    for g in geoms:
        seen.update(g.elements)
    return sorted(seen, key=lambda el: ATOMIC_NUMBERS[el])


def feature_length(cfg: FeatureConfig, vocabulary) -> int:
    n_el = len(vocabulary)
    n2 = n_el * cfg.n_radial
    if not cfg.include_three_body:
        return n2
    n_pairs = n_el * (n_el + 1) // 2
    return n2 + n_pairs * cfg.n_angular * cfg.n_radial


def _radial_basis(r: float, cfg: FeatureConfig) -> np.ndarray:
    """Gaussian radial basis with smooth cosine cutoff; zero beyond r_cut."""
    if r >= cfg.r_cut:
        return np.zeros(cfg.n_radial)
    fcut = 0.5 * (math.cos(math.pi * r / cfg.r_cut) + 1.0)
    return np.exp(-((r - cfg.centers) ** 2) / (2.0 * cfg.width ** 2)) * fcut


def invariant_features(geom: MolecularGeometry, atom_index: int, cfg: FeatureConfig,
                       vocabulary=None) -> np.ndarray:
    """Rotation/translation-invariant environment descriptor for one atom.

    Layout: per-element radial blocks (vocabulary order), then, when
    three-body is on, per unordered element-pair blocks of
    Chebyshev(cos angle) x shared-radial products.
    """
    if vocabulary is None:
        vocabulary = element_vocabulary([geom])
    if not 0 <= atom_index < len(geom):
        raise GeometryError("atom_index out of range")
    el_pos = {el: k for k, el in enumerate(vocabulary)}
    for el in geom.elements:
        if el not in el_pos:
            raise GeometryError(f"element {el!r} not in vocabulary {vocabulary}")

    neighbors = []   # (element slot, distance, radial values, unit vector)
    ri = geom.positions[atom_index]
    for j in range(len(geom)):
        if j == atom_index:
            continue
        rij = geom.positions[j] - ri
        r = float(np.linalg.norm(rij))
        if r < cfg.r_cut:
            neighbors.append((el_pos[geom.elements[j]], r, _radial_basis(r, cfg), rij / r))

    n_el = len(vocabulary)
    two_body = np.zeros((n_el, cfg.n_radial))
    for e, _, phi, _ in neighbors:
        two_body[e] += phi

    if not cfg.include_three_body:
        return two_body.reshape(-1)

    pair_slot = {}
    for a in range(n_el):
        for b in range(a, n_el):
            pair_slot[(a, b)] = len(pair_slot)
    three_body = np.zeros((len(pair_slot), cfg.n_angular, cfg.n_radial))
    for a in range(len(neighbors)):
        ea, _, phia, ua = neighbors[a]
        for b in range(a + 1, len(neighbors)):
            eb, _, phib, ub = neighbors[b]
            c = float(np.clip(np.dot(ua, ub), -1.0, 1.0))
            cheb = np.polynomial.chebyshev.chebvander(c, cfg.n_angular - 1)[0]
            slot = pair_slot[(min(ea, eb), max(ea, eb))]
            three_body[slot] += np.outer(cheb, phia * phib)
    return np.concatenate([two_body.reshape(-1), three_body.reshape(-1)])
