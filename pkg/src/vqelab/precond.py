"""Geometry-conditioned preconditioner: invariant features -> per-element MLP
readouts -> circuit angles, with gauge-aware training and label generation.

The readout ends in pi*tanh, so every predicted angle lies strictly inside
(-pi, pi).  Prediction inherits exact rigid-motion invariance from the
features.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import circuit, geometry, optim, pauli


class PrecondError(ValueError):
    pass


@dataclass(frozen=True)
class PreconditionerModel:
    feature_config: geometry.FeatureConfig
    element_vocabulary: tuple[str, ...]
    depth: int                             # ansatz depth L; readout emits 2(L+1) per qubit
    qubit_slots: dict                      # element -> qubits carried per atom of it
    hidden_width: int
    weights: dict                          # '<elem>/W0'.. '<elem>/b2' -> ndarray
    atom_qubit_map: tuple[tuple[int, ...], ...] | None = None

    @property
    def angles_per_qubit(self) -> int:
        return 2 * (self.depth + 1)

    def layer_keys(self, elem: str):
        return [f"{elem}/{nm}" for nm in ("W0", "b0", "W1", "b1", "W2", "b2")]

    def readout_keys(self):
        """Final-layer keys only (the part updated by adapt_readout)."""
        return [f"{el}/{nm}" for el in self.element_vocabulary for nm in ("W2", "b2")]


def init_model(feature_config: geometry.FeatureConfig, vocabulary, depth: int,
               qubit_slots: dict | None = None, hidden_width: int = 64,
               seed: int = 0) -> PreconditionerModel:
    """Fresh model: fan-in scaled-uniform hidden layers, zero output layer.

    Zero output weights make the untrained model predict theta = 0 everywhere.
    """
    vocabulary = tuple(vocabulary)
    if qubit_slots is None:
        qubit_slots = {el: 1 for el in vocabulary}
    rng = np.random.default_rng(seed)
    n_in = geometry.feature_length(feature_config, vocabulary)
    weights = {}
    for el in vocabulary:
        n_out = qubit_slots[el] * 2 * (depth + 1)
        dims = [n_in, hidden_width, hidden_width, n_out]
        for i in range(3):
            fan_in = dims[i]
            lim = 1.0 / np.sqrt(fan_in)
            if i == 2:
                W = np.zeros((dims[i + 1], dims[i]))
                b = np.zeros(dims[i + 1])
            else:
                W = rng.uniform(-lim, lim, size=(dims[i + 1], dims[i]))
                b = rng.uniform(-lim, lim, size=dims[i + 1])
            weights[f"{el}/W{i}"] = W
            weights[f"{el}/b{i}"] = b
    return PreconditionerModel(feature_config, vocabulary, depth, dict(qubit_slots),
                               hidden_width, weights)


# ---------------------------------------------------------------------------
# forward / backward

def _forward_atom(model: PreconditionerModel, elem: str, x: np.ndarray):
    w = model.weights
    z0 = w[f"{elem}/W0"] @ x + w[f"{elem}/b0"]
    h0 = np.tanh(z0)
    z1 = w[f"{elem}/W1"] @ h0 + w[f"{elem}/b1"]
    h1 = np.tanh(z1)
    out = w[f"{elem}/W2"] @ h1 + w[f"{elem}/b2"]
    angles = np.pi * np.tanh(out)
    cache = (x, h0, h1, out)
    return angles, cache


def _backward_atom(model: PreconditionerModel, elem: str, cache, d_angles: np.ndarray):
    """Gradient of loss wrt this atom's weights given dL/d(angles)."""
    x, h0, h1, out = cache
    w = model.weights
    d_out = d_angles * np.pi * (1.0 - np.tanh(out) ** 2)
    grads = {
        f"{elem}/W2": np.outer(d_out, h1),
        f"{elem}/b2": d_out,
    }
    d_h1 = w[f"{elem}/W2"].T @ d_out
    d_z1 = d_h1 * (1.0 - h1 ** 2)
    grads[f"{elem}/W1"] = np.outer(d_z1, h0)
    grads[f"{elem}/b1"] = d_z1
    d_h0 = w[f"{elem}/W1"].T @ d_z1
    d_z0 = d_h0 * (1.0 - h0 ** 2)
    grads[f"{elem}/W0"] = np.outer(d_z0, x)
    grads[f"{elem}/b0"] = d_z0
    return grads


def _resolve_map(model: PreconditionerModel, geom: geometry.MolecularGeometry,
                 spec: circuit.AnsatzSpec, atom_qubit_map=None):
    if atom_qubit_map is None:
        atom_qubit_map = model.atom_qubit_map
    if atom_qubit_map is None:
        atom_qubit_map = tuple((i,) for i in range(len(geom)))
    flat = [q for block in atom_qubit_map for q in block]
    if sorted(flat) != list(range(spec.n_qubits)):
        raise PrecondError("atom_qubit_map must cover every ansatz qubit exactly once")
    if len(atom_qubit_map) != len(geom):
        raise PrecondError("atom_qubit_map length != atom count")
    return atom_qubit_map


def _predict_with_caches(model, geom, spec, atom_qubit_map=None):
    aq_map = _resolve_map(model, geom, spec, atom_qubit_map)
    theta = np.zeros(spec.n_parameters)
    caches = []
    apq = model.angles_per_qubit
    for i, (el, _) in enumerate(geom.atoms):
        if el not in model.element_vocabulary:
            raise PrecondError(f"element {el!r} missing from model vocabulary")
        if len(aq_map[i]) != model.qubit_slots[el]:
            raise PrecondError(f"atom {i} ({el}) has {len(aq_map[i])} qubits, "
                               f"model expects {model.qubit_slots[el]}")
        x = geometry.invariant_features(geom, i, model.feature_config,
                                        model.element_vocabulary)
        angles, cache = _forward_atom(model, el, x)
        slots = []  # flat theta indices in readout-output order
        for s, q in enumerate(aq_map[i]):
            for layer in range(model.depth + 1):
                slots.append(spec.index(q, layer, "y"))
                slots.append(spec.index(q, layer, "z"))
        assert len(slots) == len(aq_map[i]) * apq
        theta[slots] = angles
        caches.append((el, cache, slots))
    return theta, caches


def predict(model: PreconditionerModel, geom: geometry.MolecularGeometry,
            spec: circuit.AnsatzSpec, atom_qubit_map=None) -> np.ndarray:
    """Deterministic geometry -> parameter-vector map; angles in (-pi, pi)."""
    if spec.depth != model.depth:
        raise PrecondError("ansatz depth does not match model readout width")
    theta, _ = _predict_with_caches(model, geom, spec, atom_qubit_map)
    return theta


# ---------------------------------------------------------------------------
# gauge-aware objective

def gauge_loss(theta, theta_star, spec: circuit.AnsatzSpec, lam: float) -> float:
    """||theta - theta*||^2 + lam * (1 - |<psi(theta)|psi(theta*)>|^2)."""
    theta = np.asarray(theta, float)
    theta_star = np.asarray(theta_star, float)
    if theta.shape != theta_star.shape:
        raise PrecondError("parameter length mismatch")
    anchor = float(np.sum((theta - theta_star) ** 2))
    if lam == 0.0 or anchor == 0.0:
        # identical parameters give fidelity 1 exactly; skip the float residue
        return anchor
    return anchor + lam * max(1.0 - circuit.fidelity(spec, theta, theta_star), 0.0)


def fidelity_gradient(spec: circuit.AnsatzSpec, theta, theta_star) -> np.ndarray:
    """d/dtheta |<psi(theta)|psi(theta*)>|^2 by the parameter-shift rule.

    The overlap is an expectation of the projector onto |psi(theta*)>, so the
    two-point shift rule is exact.
    """
    theta = np.asarray(theta, float)
    g = np.empty_like(theta)
    s = np.pi / 2
    target = circuit.prepare_state(spec, np.asarray(theta_star, float))
    for k in range(theta.size):
        tp = theta.copy(); tp[k] += s
        tm = theta.copy(); tm[k] -= s
        fp = abs(np.vdot(target, circuit.prepare_state(spec, tp))) ** 2
        fm = abs(np.vdot(target, circuit.prepare_state(spec, tm))) ** 2
        g[k] = 0.5 * (fp - fm)
    return g


# ---------------------------------------------------------------------------
# training data

@dataclass(frozen=True)
class TrainingExample:
    geometry: geometry.MolecularGeometry
    hamiltonian: pauli.QubitHamiltonian
    target_parameters: np.ndarray
    target_energy: float
    suspect: bool = False


@dataclass(frozen=True)
class TrainingSet:
    examples: tuple[TrainingExample, ...]

    def __len__(self):
        return len(self.examples)


@dataclass(frozen=True)
class TrainConfig:
    lambda_fidelity: float = 0.1
    epochs: int = 200
    batch_size: int = 8
    optimizer: optim.TrainOptimConfig = field(default_factory=optim.TrainOptimConfig)
    seed: int = 0
    fidelity_term: str = "exact"     # 'exact' | 'off'

    def __post_init__(self):
        if self.lambda_fidelity < 0:
            raise PrecondError("lambda_fidelity must be >= 0")
        if self.fidelity_term not in ("exact", "off"):
            raise PrecondError("fidelity_term must be 'exact' or 'off'")


def validate_training_set(dataset: TrainingSet, spec: circuit.AnsatzSpec,
                          tol: float = 1e-6):
    for i, ex in enumerate(dataset.examples):
        e = circuit.energy(spec, ex.target_parameters, ex.hamiltonian)
        if abs(e - ex.target_energy) > tol:
            raise PrecondError(
                f"example {i}: target parameters give energy {e}, "
                f"recorded {ex.target_energy}")


class TrainingDiverged(RuntimeError):
    def __init__(self, trace):
        super().__init__("training loss diverged")
        self.trace = trace


def _train_impl(model: PreconditionerModel, dataset: TrainingSet,
                spec: circuit.AnsatzSpec, cfg: TrainConfig, trainable_keys=None):
    if len(dataset) == 0:
        raise PrecondError("dataset is empty")
    validate_training_set(dataset, spec)
    lam = cfg.lambda_fidelity if cfg.fidelity_term == "exact" else 0.0
    rng = np.random.default_rng(cfg.seed)
    state = optim.AdamState()
    weights = {k: v.copy() for k, v in model.weights.items()}
    if trainable_keys is None:
        trainable_keys = list(weights)
    trace = []   # rows: (epoch, mean_loss, anchor_term, fidelity_term)
    initial_loss = None
    step = 0
    n = len(dataset)
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = epoch_anchor = epoch_fid = 0.0
        for start in range(0, n, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            grads = {k: np.zeros_like(weights[k]) for k in trainable_keys}
            cur = replace(model, weights=weights)
            for idx in batch:
                ex = dataset.examples[int(idx)]
                theta, caches = _predict_with_caches(cur, ex.geometry, spec)
                diff = theta - ex.target_parameters
                anchor = float(diff @ diff)
                d_theta = 2.0 * diff
                fid_term = 0.0
                if lam > 0:
                    fid = circuit.fidelity(spec, theta, ex.target_parameters)
                    fid_term = lam * (1.0 - fid)
                    d_theta = d_theta - lam * fidelity_gradient(
                        spec, theta, ex.target_parameters)
                loss = anchor + fid_term
                epoch_loss += loss
                epoch_anchor += anchor
                epoch_fid += fid_term
                for el, cache, slots in caches:
                    g_atom = _backward_atom(cur, el, cache, d_theta[slots])
                    for k, v in g_atom.items():
                        if k in grads:
                            grads[k] += v
            for k in grads:
                grads[k] /= len(batch)
            sub_w = {k: weights[k] for k in trainable_keys}
            sub_w = optim.decayed_weight_gradient_step(sub_w, grads, step,
                                                       cfg.optimizer, state)
            weights.update(sub_w)
            step += 1
        mean_loss = epoch_loss / n
        trace.append((epoch, mean_loss, epoch_anchor / n, epoch_fid / n))
        if initial_loss is None:
            initial_loss = max(mean_loss, 1e-12)
        if mean_loss > 1e3 * initial_loss:
            raise TrainingDiverged(trace)
    return replace(model, weights=weights), trace


def train(model: PreconditionerModel, dataset: TrainingSet,
          spec: circuit.AnsatzSpec, cfg: TrainConfig):
    """Minimize the mean gauge-aware loss; returns (trained model, loss trace).

    The anchor gradient is analytic, the fidelity gradient uses the
    parameter-shift rule on the state overlap; both are backpropagated through
    pi*tanh and the readout MLP.  Deterministic given (model, dataset, cfg).
    """
    return _train_impl(model, dataset, spec, cfg)


def adapt_readout(model: PreconditionerModel, small_dataset: TrainingSet,
                  spec: circuit.AnsatzSpec, cfg: TrainConfig):
    """Few-label adaptation: only final readout-layer weights receive updates."""
    if len(small_dataset) < 1:
        raise PrecondError("adaptation dataset must be non-empty")
    return _train_impl(model, small_dataset, spec, cfg,
                       trainable_keys=model.readout_keys())


# ---------------------------------------------------------------------------
# label generation

def generate_labels(pairs, spec: circuit.AnsatzSpec,
                    bh_cfg: optim.BasinHoppingConfig,
                    suspect_margin: float = 1e-3) -> TrainingSet:
    """Basin-hopping energy minimization per (geometry, Hamiltonian) pair.

    Labels whose energy exceeds the exact ground energy by more than
    `suspect_margin` are kept but flagged.  Optimizer aborts skip the example.
    """
    examples = []
    for geom, H in pairs:
        if H.n_qubits != spec.n_qubits:
            raise PrecondError("Hamiltonian qubit count != ansatz qubit count")
        mat = pauli.to_sparse(H)

        def obj(t, _m=mat):
            return circuit.energy(spec, t, H, _sparse=_m)

        def grad(t, _m=mat):
            # reverse-mode route; verified against the parameter-shift rule
            return circuit._gradient_adjoint(spec, t, H, _sparse=_m)

        theta0 = np.zeros(spec.n_parameters)
        try:
            rep = optim.basin_hopping(obj, grad, theta0, bh_cfg)
        except optim.NonFiniteObjectiveError:
            continue
        theta = circuit.wrap_angles(rep.final_parameters)
        e = obj(theta)
        e_exact = pauli.exact_ground_state(H).ground_energy
        examples.append(TrainingExample(geom, H, theta, e,
                                        suspect=(e - e_exact) > suspect_margin))
    return TrainingSet(tuple(examples))


# ---------------------------------------------------------------------------
# Hartree-Fock baseline parameters

def hf_theta(spec: circuit.AnsatzSpec, hf_bitstring) -> np.ndarray:
    """Parameters preparing the computational basis state |bits> exactly.

    Depth 0: Ry(pi) on set bits in the initial layer.  Depth > 0: the flips go
    in the final rotation layer, targeting the preimage of the bitstring under
    the trailing entangling layer, so prepare_state still yields |bits>.
    """
    bits = [int(b) for b in hf_bitstring]
    if len(bits) != spec.n_qubits:
        raise PrecondError("bitstring length != n_qubits")
    if any(b not in (0, 1) for b in bits):
        raise PrecondError("bitstring entries must be 0/1")
    theta = np.zeros(spec.n_parameters)
    if spec.depth == 0:
        layer, target = 0, bits
    else:
        # invert the final brick-wall pass: apply odd then even CNOTs classically
        target = list(bits)
        n = spec.n_qubits
        for i in range(1, n - 1, 2):
            target[i + 1] ^= target[i]
        for i in range(0, n - 1, 2):
            target[i + 1] ^= target[i]
        layer = spec.depth
    for q, b in enumerate(target):
        if b:
            theta[spec.index(q, layer, "y")] = np.pi
    return theta


# ---------------------------------------------------------------------------
# checkpoints

def save_checkpoint(model: PreconditionerModel) -> str:
    doc = {
        "format_version": 1,
        "feature_config": {
            "r_cut": model.feature_config.r_cut,
            "n_radial": model.feature_config.n_radial,
            "radial_width": model.feature_config.radial_width,
            "include_three_body": model.feature_config.include_three_body,
            "n_angular": model.feature_config.n_angular,
        },
        "element_vocabulary": list(model.element_vocabulary),
        "depth": model.depth,
        "qubit_slots": model.qubit_slots,
        "hidden_width": model.hidden_width,
        "atom_qubit_map": (None if model.atom_qubit_map is None
                           else [list(b) for b in model.atom_qubit_map]),
        "weights": {k: {"shape": list(v.shape), "data": v.reshape(-1).tolist()}
                    for k, v in model.weights.items()},
    }
    return json.dumps(doc)


def load_checkpoint(text: str) -> PreconditionerModel:
    doc = json.loads(text)
    if doc.get("format_version") != 1:
        raise PrecondError("unsupported checkpoint format_version")
    fc = geometry.FeatureConfig(**doc["feature_config"])
    weights = {k: np.array(v["data"]).reshape(v["shape"])
               for k, v in doc["weights"].items()}
    aqm = doc.get("atom_qubit_map")
    return PreconditionerModel(
        fc, tuple(doc["element_vocabulary"]), int(doc["depth"]),
        dict(doc["qubit_slots"]), int(doc["hidden_width"]), weights,
        None if aqm is None else tuple(tuple(b) for b in aqm))
