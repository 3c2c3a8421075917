"""Brick-wall hardware-efficient ansatz on a dense statevector.

Gate conventions: Ry(t) = exp(-i t Y / 2), Rz(p) = exp(-i p Z / 2).  Each
qubit carries a (y, z) angle pair per layer; within a layer block the Rz acts
first on the state, then the Ry, then (for layers >= 1) the entangling layer.
Qubit 0 is the least significant bit; entangler controls sit on the lower
index.  Gates are applied in place with stride-based indexing - no 2^N x 2^N
matrices are ever built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pauli


@dataclass(frozen=True)
class AnsatzSpec:
    """Circuit layout: N qubits, depth L (L+1 rotation layers, L entangling)."""
    n_qubits: int
    depth: int

    def __post_init__(self):
        if self.n_qubits < 1 or self.depth < 0:
            raise ValueError("need n_qubits >= 1 and depth >= 0")

    @property
    def n_parameters(self) -> int:
        return param_count(self.n_qubits, self.depth)

    def index(self, qubit: int, layer: int, slot: str) -> int:
        """Flat index of the (qubit, layer, slot) angle; slot 'y' or 'z'.

        Layout: layers are contiguous blocks of 2N, each qubit contributing a
        (y, z) pair: idx = 2*(layer*N + qubit) + (0 if y else 1).
        """
        if not (0 <= qubit < self.n_qubits and 0 <= layer <= self.depth):
            raise ValueError("qubit/layer out of range")
        if slot not in ("y", "z"):
            raise ValueError("slot must be 'y' or 'z'")
        return 2 * (layer * self.n_qubits + qubit) + (0 if slot == "y" else 1)

    def generator(self, k: int) -> tuple[str, int]:
        """(Pauli letter, qubit) of the half-Pauli generating parameter k."""
        if not (0 <= k < self.n_parameters):
            raise ValueError("parameter index out of range")
        qubit = (k // 2) % self.n_qubits
        return ("Y" if k % 2 == 0 else "Z", qubit)


def param_count(n_qubits: int, depth: int) -> int:
    """2 N (L+1): two rotation angles per qubit per layer, initial included."""
    if n_qubits < 1 or depth < 0:
        raise ValueError("need n_qubits >= 1 and depth >= 0")
    return 2 * n_qubits * (depth + 1)


def wrap_angles(theta: np.ndarray) -> np.ndarray:
    """Canonical representative of each angle in (-pi, pi]."""
    t = np.asarray(theta, dtype=float)
    wrapped = np.mod(-t + np.pi, 2 * np.pi)
    return -(wrapped - np.pi)


# ---------------------------------------------------------------------------
# in-place gate kernels on the (2,)*n view

def _axis(n: int, q: int) -> int:
    return n - 1 - q


def _apply_1q(view: np.ndarray, n: int, q: int, u: np.ndarray):
    v = np.moveaxis(view, _axis(n, q), 0)
    v0 = v[0].copy()
    v[0] = u[0, 0] * v0 + u[0, 1] * v[1]
    v[1] = u[1, 0] * v0 + u[1, 1] * v[1]


def _apply_cnot(view: np.ndarray, n: int, control: int, target: int):
    v = np.moveaxis(view, (_axis(n, control), _axis(n, target)), (0, 1))
    tmp = v[1, 0].copy()
    v[1, 0] = v[1, 1]
    v[1, 1] = tmp


def _ry(t: float) -> np.ndarray:
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(p: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * p), 0], [0, np.exp(0.5j * p)]], dtype=complex)


def entangling_layer(psi: np.ndarray, n_qubits: int) -> np.ndarray:
    """Brick-wall CNOT pass: even controls first, then odd; open boundary."""
    out = np.array(psi, dtype=complex)
    view = out.reshape((2,) * n_qubits)
    for i in range(0, n_qubits - 1, 2):
        _apply_cnot(view, n_qubits, i, i + 1)
    for i in range(1, n_qubits - 1, 2):
        _apply_cnot(view, n_qubits, i, i + 1)
    return out


def prepare_state(spec: AnsatzSpec, theta: np.ndarray) -> np.ndarray:
    """|psi(theta)> from |0...0>: rotation layer 0, then L x (rotations, entangler)."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.n_parameters,):
        raise ValueError(f"theta length {theta.shape} != ({spec.n_parameters},)")
    n = spec.n_qubits
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    view = psi.reshape((2,) * n)
    for layer in range(spec.depth + 1):
        for q in range(n):
            ty = theta[spec.index(q, layer, "y")]
            tz = theta[spec.index(q, layer, "z")]
            # Rz acts first on the state, then Ry (operator product Ry Rz)
            _apply_1q(view, n, q, _ry(ty) @ _rz(tz))
        if layer > 0:
            # repeated blocks are rotations followed by the entangler;
            # the initial layer (layer 0) carries no entangler
            for i in range(0, n - 1, 2):
                _apply_cnot(view, n, i, i + 1)
            for i in range(1, n - 1, 2):
                _apply_cnot(view, n, i, i + 1)
    return psi


def energy(spec: AnsatzSpec, theta: np.ndarray, H: pauli.QubitHamiltonian,
           _sparse=None) -> float:
    """<psi(theta)| H |psi(theta)>."""
    if spec.n_qubits != H.n_qubits:
        raise ValueError("ansatz and Hamiltonian qubit counts differ")
    psi = prepare_state(spec, theta)
    if _sparse is not None:
        return float(np.vdot(psi, _sparse @ psi).real)
    return pauli.expectation(H, psi)


def gradient(spec: AnsatzSpec, theta: np.ndarray, H: pauli.QubitHamiltonian) -> np.ndarray:
    """Exact gradient by the two-point parameter-shift rule.

    dE/dk = [E(theta + pi/2 e_k) - E(theta - pi/2 e_k)] / 2; exact because
    every generator is a half-Pauli.
    """
    theta = np.asarray(theta, dtype=float)
    mat = pauli.to_sparse(H)
    g = np.empty(spec.n_parameters)
    shift = np.pi / 2
    for k in range(spec.n_parameters):
        tp = theta.copy(); tp[k] += shift
        tm = theta.copy(); tm[k] -= shift
        g[k] = 0.5 * (energy(spec, tp, H, _sparse=mat) - energy(spec, tm, H, _sparse=mat))
    return g


def _apply_pauli_inplace(view: np.ndarray, n: int, q: int, p: str):
    v = np.moveaxis(view, _axis(n, q), 0)
    if p == "Y":
        v[[0, 1]] = v[[1, 0]]
        v[0] *= -1j
        v[1] *= 1j
    else:  # Z
        v[1] *= -1


def _gradient_adjoint(spec: AnsatzSpec, theta: np.ndarray, H: pauli.QubitHamiltonian,
                      _sparse=None) -> np.ndarray:
    """Reverse-mode gradient; agrees with the parameter-shift route to 1e-10.

    Cost is O(gates) statevector passes instead of O(parameters), so the
    optimization loops use this route; `gradient` stays the reference.
    """
    theta = np.asarray(theta, dtype=float)
    n = spec.n_qubits
    psi = prepare_state(spec, theta)
    mat = pauli.to_sparse(H) if _sparse is None else _sparse
    lam = np.asarray(mat @ psi)
    psi = psi.copy()
    g = np.zeros(spec.n_parameters)
    pv = psi.reshape((2,) * n)
    lv = lam.reshape((2,) * n)
    # walk the circuit backwards, un-applying each gate from both vectors;
    # for U = exp(-i t G/2), dE/dt = Im<lam|G|psi> with both vectors sitting
    # just after that gate
    for layer in range(spec.depth, -1, -1):
        if layer > 0:
            # CNOTs are self-inverse and commute within a pass: odd pass
            # first, then even, undoes the forward even-then-odd order
            for i in range(1, n - 1, 2):
                _apply_cnot(pv, n, i, i + 1)
                _apply_cnot(lv, n, i, i + 1)
            for i in range(0, n - 1, 2):
                _apply_cnot(pv, n, i, i + 1)
                _apply_cnot(lv, n, i, i + 1)
        for q in range(n):
            ty = theta[spec.index(q, layer, "y")]
            tz = theta[spec.index(q, layer, "z")]
            tmp = psi.copy()
            _apply_pauli_inplace(tmp.reshape((2,) * n), n, q, "Y")
            g[spec.index(q, layer, "y")] = np.vdot(lam, tmp).imag
            ry_dag = _ry(-ty)
            _apply_1q(pv, n, q, ry_dag)
            _apply_1q(lv, n, q, ry_dag)
            tmp = psi.copy()
            _apply_pauli_inplace(tmp.reshape((2,) * n), n, q, "Z")
            g[spec.index(q, layer, "z")] = np.vdot(lam, tmp).imag
            rz_dag = _rz(-tz)
            _apply_1q(pv, n, q, rz_dag)
            _apply_1q(lv, n, q, rz_dag)
    return g


def hessian(spec: AnsatzSpec, theta: np.ndarray, H: pauli.QubitHamiltonian) -> np.ndarray:
    """Exact Hessian by the four-point double-shift rule, symmetrized."""
    theta = np.asarray(theta, dtype=float)
    P = spec.n_parameters
    mat = pauli.to_sparse(H)
    s = np.pi / 2
    out = np.empty((P, P))

    def e_at(dj, j, dk, k):
        t = theta.copy()
        t[j] += dj
        t[k] += dk
        return energy(spec, t, H, _sparse=mat)

    e0 = energy(spec, theta, H, _sparse=mat)
    for j in range(P):
        # diagonal: shifts coincide, reduces to E(+pi) - 2E + E(-pi) over 4
        ep = e_at(s, j, s, j)
        em = e_at(-s, j, -s, j)
        out[j, j] = (ep - 2 * e0 + em) / 4.0
        for k in range(j + 1, P):
            val = (e_at(s, j, s, k) - e_at(s, j, -s, k)
                   - e_at(-s, j, s, k) + e_at(-s, j, -s, k)) / 4.0
            out[j, k] = val
            out[k, j] = val
    return 0.5 * (out + out.T)


def fidelity(spec: AnsatzSpec, theta: np.ndarray, theta2: np.ndarray) -> float:
    """|<psi(theta)|psi(theta2)>|^2."""
    a = prepare_state(spec, theta)
    b = prepare_state(spec, theta2)
    return float(abs(np.vdot(a, b)) ** 2)
