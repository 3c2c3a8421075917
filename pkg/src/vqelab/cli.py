"""Command-line entry point: config-driven, reproducible runs.

Config files are INI-style (key = value within [sections]); unknown sections
or keys are fatal so that archived manifests stay trustworthy.  Exit codes:
0 success, 2 configuration/validation problem, 3 numerical failure.  CSV
bodies contain no timestamps, so identical config + seed reproduces them
byte for byte.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, circuit, diagnostics, geometry, optim, pauli, precond

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


class ConfigError(ValueError):
    pass


# keys allowed per section; shared across commands, validated per command
_ALLOWED_KEYS = {
    "run": {"seed", "out"},
    "hamiltonian": {"file", "element", "n_atoms", "spacing",
                    "j0", "r0", "xi", "h", "r_cut", "sigma_pos"},
    "ansatz": {"n_qubits", "depth"},
    "init": {"source", "file", "model"},
    "optimizer": {"kind", "tol", "max_evals", "max_steps",
                  "a", "c", "big_a", "alpha", "gamma",
                  "temperature", "hop_steps", "restarts", "hop_scale",
                  "n_shots"},
    "labels": {"n_geometries", "sigma_pos", "out_file",
               "hop_steps", "restarts", "temperature", "hop_scale",
               "local_max_evals"},
    "precond": {"labels_file", "model_in", "model_out", "hidden_width",
                "epochs", "batch_size", "lambda_fidelity", "fidelity_term",
                "lr_start", "lr_end", "warmup_steps", "total_steps",
                "weight_decay", "r_cut", "n_radial", "n_angular",
                "include_three_body"},
    "diagnose": {"sizes", "depth", "n_samples", "tol_neg", "tol_zero",
                 "sigma_grid", "strategies", "budget", "threshold", "n_trials",
                 "model", "variance", "epsilon", "steps_discovery",
                 "steps_local", "files", "dir1_index", "dir2_index",
                 "half_range", "resolution", "sigma_pos", "strategy"},
}


def _load_config(path: str) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if not Path(path).exists():
        raise ConfigError(f"config file not found: {path}")
    cp.read(path)
    for section in cp.sections():
        if section not in _ALLOWED_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _ALLOWED_KEYS[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")
    return cp


def _require_seed(cp, args) -> int:
    if args.seed is not None:
        return args.seed
    if cp.has_option("run", "seed"):
        return cp.getint("run", "seed")
    raise ConfigError("stochastic commands require an explicit seed "
                      "(--seed or [run] seed)")


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _config_echo(cp) -> dict:
    return {s: dict(cp[s]) for s in cp.sections()}


def _write_manifest(out_dir: Path, command: str, seed, cp, inputs, outputs,
                    wall_time: float):
    manifest = {
        "artifact_version": __version__,
        "command": command,
        "seed": seed,
        "config": _config_echo(cp),
        "input_digests": {str(p): _digest(Path(p)) for p in inputs if Path(p).exists()},
        "outputs": [str(o) for o in outputs],
        "wall_time_s": wall_time,
    }
    path = out_dir / f"manifest_{command.replace(' ', '_')}_{seed}.json"
    path.write_text(json.dumps(manifest, indent=1))
    return path


def _write_csv(path: Path, comment_lines, header, rows):
    with path.open("w") as fh:
        for line in comment_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _out_name(out_dir: Path, scan: str, seed) -> Path:
    stamp = time.strftime("%Y%m%dT%H%M%S")
    return out_dir / f"{scan}_{stamp}_{seed}.csv"


# ---------------------------------------------------------------------------
# shared builders

def _load_hamiltonian(cp, inputs: list):
    sec = cp["hamiltonian"] if cp.has_section("hamiltonian") else None
    if sec is None:
        raise ConfigError("missing [hamiltonian] section")
    if "file" in sec:
        path = Path(sec["file"])
        if not path.exists():
            raise ConfigError(f"Hamiltonian file not found: {path}")
        inputs.append(path)
        H = pauli.parse_hamiltonian(path.read_text())
        return H, H.geometry
    for key in ("element", "n_atoms", "spacing"):
        if key not in sec:
            raise ConfigError(f"[hamiltonian] needs 'file' or chain keys; missing '{key}'")
    geom = geometry.linear_chain(sec["element"], sec.getint("n_atoms"),
                                 sec.getfloat("spacing"))
    params = pauli.ChainModelParams(
        J0=sec.getfloat("j0", 1.0), r0=sec.getfloat("r0", 1.0),
        xi=sec.getfloat("xi", 1.0), h=sec.getfloat("h", 0.25),
        r_cut=sec.getfloat("r_cut", 1.5))
    return pauli.build_chain_model(geom, params), geom


def _chain_params(sec) -> pauli.ChainModelParams:
    return pauli.ChainModelParams(
        J0=sec.getfloat("j0", 1.0), r0=sec.getfloat("r0", 1.0),
        xi=sec.getfloat("xi", 1.0), h=sec.getfloat("h", 0.25),
        r_cut=sec.getfloat("r_cut", 1.5))


def _load_spec(cp, H) -> circuit.AnsatzSpec:
    if cp.has_section("ansatz"):
        n = cp["ansatz"].getint("n_qubits", H.n_qubits if H else None)
        if n is None:
            raise ConfigError("[ansatz] n_qubits required when no Hamiltonian is given")
        depth = cp["ansatz"].getint("depth", 1)
    elif H is not None:
        n, depth = H.n_qubits, 1
    else:
        raise ConfigError("missing [ansatz] section")
    if H is not None and n != H.n_qubits:
        raise ConfigError(f"[ansatz] n_qubits={n} but Hamiltonian has {H.n_qubits}")
    return circuit.AnsatzSpec(n, depth)


def _load_model(path_str: str, inputs: list) -> precond.PreconditionerModel:
    path = Path(path_str)
    if not path.exists():
        raise ConfigError(f"model checkpoint not found: {path}")
    inputs.append(path)
    return precond.load_checkpoint(path.read_text())


def _initial_theta(cp, spec, H, geom, seed, inputs) -> np.ndarray:
    sec = cp["init"] if cp.has_section("init") else {"source": "zeros"}
    source = sec.get("source", "zeros")
    if source == "zeros":
        return np.zeros(spec.n_parameters)
    if source == "random":
        rng = np.random.default_rng(seed)
        return rng.uniform(-np.pi, np.pi, size=spec.n_parameters)
    if source == "hf":
        if H.hf_bitstring is None:
            raise ConfigError("init source 'hf' needs hf_bitstring in the Hamiltonian file")
        return precond.hf_theta(spec, H.hf_bitstring)
    if source == "predict":
        if "model" not in sec:
            raise ConfigError("init source 'predict' needs [init] model = <checkpoint>")
        model = _load_model(sec["model"], inputs)
        if geom is None:
            raise ConfigError("init source 'predict' needs a geometry")
        return precond.predict(model, geom, spec, atom_qubit_map=H.atom_qubit_map)
    if source == "file":
        path = Path(sec["file"])
        if not path.exists():
            raise ConfigError(f"parameter file not found: {path}")
        inputs.append(path)
        theta = np.asarray(json.loads(path.read_text()), float)
        if theta.shape != (spec.n_parameters,):
            raise ConfigError("parameter file length does not match ansatz")
        return theta
    raise ConfigError(f"unknown init source {source!r}")


def _reference_energy(H):
    if "fci" in H.reference_energies:
        return H.reference_energies["fci"]
    if H.n_qubits <= pauli.QUBIT_CAP:
        return pauli.exact_ground_state(H).ground_energy
    return None


# ---------------------------------------------------------------------------
# commands

def cmd_energy(cp, args) -> int:
    inputs = []
    seed = args.seed if args.seed is not None else cp.getint("run", "seed", fallback=0)
    H, geom = _load_hamiltonian(cp, inputs)
    spec = _load_spec(cp, H)
    theta = _initial_theta(cp, spec, H, geom, seed, inputs)
    e = circuit.energy(spec, theta, H)
    print(f"energy = {e:.12f} Ha")
    e_ref = _reference_energy(H)
    if e_ref is not None:
        print(f"reference = {e_ref:.12f} Ha")
        print(f"delta_e = {e - e_ref:.12e} Ha")
    return EXIT_OK


def cmd_optimize(cp, args) -> int:
    t0 = time.time()
    inputs = []
    seed = _require_seed(cp, args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    H, geom = _load_hamiltonian(cp, inputs)
    spec = _load_spec(cp, H)
    theta0 = _initial_theta(cp, spec, H, geom, seed, inputs)
    sec = cp["optimizer"] if cp.has_section("optimizer") else None
    if sec is None or "kind" not in sec:
        raise ConfigError("missing [optimizer] kind")
    kind = sec["kind"]
    mat = pauli.to_sparse(H)

    def obj(t):
        return circuit.energy(spec, t, H, _sparse=mat)

    def grad(t):
        return circuit._gradient_adjoint(spec, t, H, _sparse=mat)

    if kind == "lbfgs":
        rep = optim.minimize_lbfgs(obj, grad, theta0,
                                   tol=sec.getfloat("tol", 1e-9),
                                   max_evals=sec.getint("max_evals", 5000))
    elif kind == "spsa":
        cfg = optim.SPSAConfig(
            a=sec.getfloat("a", 0.1), c=sec.getfloat("c", 0.1),
            A=sec.getfloat("big_a", 10.0), alpha=sec.getfloat("alpha", 0.602),
            gamma=sec.getfloat("gamma", 0.101),
            max_steps=sec.getint("max_steps", 200), seed=seed)
        objective = obj
        if sec.getint("n_shots", 0) > 0:
            var = pauli.hamiltonian_variance(H, circuit.prepare_state(spec, theta0))
            objective = optim.shot_noise_wrapper(obj, var, sec.getint("n_shots"), seed)
        rep = optim.minimize_spsa(objective, theta0, cfg)
    elif kind == "basinhopping":
        cfg = optim.BasinHoppingConfig(
            temperature=sec.getfloat("temperature", 0.5),
            hop_steps=sec.getint("hop_steps", 100),
            restarts=sec.getint("restarts", 10),
            hop_scale=sec.getfloat("hop_scale", 0.5), seed=seed)
        rep = optim.basin_hopping(obj, grad, theta0, cfg)
    else:
        raise ConfigError(f"unknown optimizer kind {kind!r}")

    trace_path = _out_name(out_dir, f"optimize_{kind}", seed)
    _write_csv(trace_path,
               [f"command=optimize kind={kind}", f"seed={seed}"],
               ["eval_count", "energy"], rep.trace)
    params_path = out_dir / f"final_parameters_{kind}_{seed}.json"
    params_path.write_text(json.dumps(list(rep.final_parameters)))
    e_ref = _reference_energy(H)
    e_final = obj(rep.final_parameters)
    print(f"final energy = {e_final:.12f} Ha  ({rep.termination}, "
          f"{rep.evaluations_used} evals)")
    if e_ref is not None:
        print(f"final delta_e = {e_final - e_ref:.6e} Ha")
    _write_manifest(out_dir, "optimize", seed, cp, inputs,
                    [trace_path, params_path], time.time() - t0)
    return EXIT_OK


def _labels_to_json(dataset: precond.TrainingSet) -> str:
    rows = []
    for ex in dataset.examples:
        rows.append({
            "geometry": [{"element": el, "xyz": list(map(float, p))}
                         for el, p in ex.geometry.atoms],
            "hamiltonian": json.loads(pauli.serialize_hamiltonian(ex.hamiltonian)),
            "theta": list(map(float, ex.target_parameters)),
            "energy": ex.target_energy,
            "suspect": ex.suspect,
        })
    return json.dumps({"format_version": 1, "examples": rows})


def _labels_from_json(text: str) -> precond.TrainingSet:
    doc = json.loads(text)
    examples = []
    for row in doc["examples"]:
        geom = geometry.MolecularGeometry(
            [(a["element"], a["xyz"]) for a in row["geometry"]])
        H = pauli.parse_hamiltonian(json.dumps(row["hamiltonian"]))
        examples.append(precond.TrainingExample(
            geom, H, np.asarray(row["theta"], float), float(row["energy"]),
            bool(row.get("suspect", False))))
    return precond.TrainingSet(tuple(examples))


def cmd_labels(cp, args) -> int:
    t0 = time.time()
    inputs = []
    seed = _require_seed(cp, args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not cp.has_section("hamiltonian"):
        raise ConfigError("missing [hamiltonian] section")
    sec_h = cp["hamiltonian"]
    if "file" in sec_h:
        raise ConfigError("labels command generates chain-model datasets; "
                          "use chain keys in [hamiltonian]")
    base = geometry.linear_chain(sec_h["element"], sec_h.getint("n_atoms"),
                                 sec_h.getfloat("spacing"))
    params = _chain_params(sec_h)
    sec = cp["labels"] if cp.has_section("labels") else None
    if sec is None:
        raise ConfigError("missing [labels] section")
    n_geo = sec.getint("n_geometries", 10)
    sigma_pos = sec.getfloat("sigma_pos", 0.05)
    spec = _load_spec(cp, None)
    pairs = []
    for i in range(n_geo):
        g = geometry.perturb_positions(base, sigma_pos, seed + i) if sigma_pos > 0 else base
        pairs.append((g, pauli.build_chain_model(g, params)))
    bh = optim.BasinHoppingConfig(
        temperature=sec.getfloat("temperature", 0.5),
        hop_steps=sec.getint("hop_steps", 100),
        restarts=sec.getint("restarts", 10),
        hop_scale=sec.getfloat("hop_scale", 0.5),
        seed=seed,
        local_max_evals=sec.getint("local_max_evals", 2000))
    dataset = precond.generate_labels(pairs, spec, bh)
    out_file = out_dir / sec.get("out_file", f"labels_{seed}.json")
    out_file.write_text(_labels_to_json(dataset))
    print(f"wrote {len(dataset)} labels to {out_file} "
          f"({sum(ex.suspect for ex in dataset.examples)} suspect)")
    _write_manifest(out_dir, "labels", seed, cp, inputs, [out_file],
                    time.time() - t0)
    return EXIT_OK


def _train_config(sec, seed) -> precond.TrainConfig:
    return precond.TrainConfig(
        lambda_fidelity=sec.getfloat("lambda_fidelity", 0.1),
        epochs=sec.getint("epochs", 200),
        batch_size=sec.getint("batch_size", 8),
        optimizer=optim.TrainOptimConfig(
            weight_decay=sec.getfloat("weight_decay", 1e-4),
            lr_start=sec.getfloat("lr_start", 1e-3),
            lr_end=sec.getfloat("lr_end", 1e-6),
            warmup_steps=sec.getint("warmup_steps", 10),
            total_steps=sec.getint("total_steps", 1000)),
        seed=seed,
        fidelity_term=sec.get("fidelity_term", "exact"))


def cmd_precond_train(cp, args, adapt: bool = False) -> int:
    t0 = time.time()
    inputs = []
    seed = _require_seed(cp, args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sec = cp["precond"] if cp.has_section("precond") else None
    if sec is None or "labels_file" not in sec:
        raise ConfigError("missing [precond] labels_file")
    labels_path = Path(sec["labels_file"])
    if not labels_path.exists():
        raise ConfigError(f"labels file not found: {labels_path}")
    inputs.append(labels_path)
    dataset = _labels_from_json(labels_path.read_text())
    if len(dataset) == 0:
        raise ConfigError("labels file holds no examples")
    spec = _load_spec(cp, dataset.examples[0].hamiltonian)

    if adapt or "model_in" in sec:
        model = _load_model(sec["model_in"], inputs)
    else:
        fc = geometry.FeatureConfig(
            r_cut=sec.getfloat("r_cut", 5.0),
            n_radial=sec.getint("n_radial", 8),
            include_three_body=sec.getboolean("include_three_body", True),
            n_angular=sec.getint("n_angular", 4))
        vocab = geometry.element_vocabulary(
            [ex.geometry for ex in dataset.examples])
        model = precond.init_model(fc, vocab, spec.depth,
                                   hidden_width=sec.getint("hidden_width", 64),
                                   seed=seed)
    cfg = _train_config(sec, seed)
    try:
        if adapt:
            model, trace = precond.adapt_readout(model, dataset, spec, cfg)
        else:
            model, trace = precond.train(model, dataset, spec, cfg)
    except precond.TrainingDiverged as e:
        print("training diverged", file=sys.stderr)
        trace_path = _out_name(out_dir, "loss_diverged", seed)
        _write_csv(trace_path, [f"seed={seed}", "diverged=true"],
                   ["epoch", "mean_loss", "anchor_term", "fidelity_term"], e.trace)
        return EXIT_NUMERICAL

    ckpt_path = out_dir / sec.get("model_out", f"model_{seed}.json")
    ckpt_path.write_text(precond.save_checkpoint(model))
    trace_path = _out_name(out_dir, "loss", seed)
    _write_csv(trace_path, [f"command={'precond-adapt' if adapt else 'precond-train'}",
                            f"seed={seed}"],
               ["epoch", "mean_loss", "anchor_term", "fidelity_term"], trace)
    print(f"final mean loss = {trace[-1][1]:.6e}; checkpoint {ckpt_path}")
    _write_manifest(out_dir, "precond-adapt" if adapt else "precond-train",
                    seed, cp, inputs, [ckpt_path, trace_path], time.time() - t0)
    return EXIT_OK


def cmd_diagnose(cp, args) -> int:
    t0 = time.time()
    inputs = []
    seed = _require_seed(cp, args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sub = args.subcommand
    sec = cp["diagnose"] if cp.has_section("diagnose") else configparser.ConfigParser()["DEFAULT"]
    outputs = []
    echo = [f"command=diagnose {sub}", f"seed={seed}"]

    if sub == "shots":
        est = diagnostics.shot_cost(
            sec.getfloat("variance", 1.0),
            sec.getfloat("epsilon", diagnostics.CHEMICAL_ACCURACY),
            sec.getint("steps_discovery", 0),
            sec.getint("steps_local", 100))
        path = _out_name(out_dir, "shots", seed)
        _write_csv(path, echo,
                   ["n_shots", "epsilon", "variance", "steps_discovery",
                    "steps_local", "total_cost"],
                   [(est.n_shots, est.epsilon, est.hamiltonian_variance,
                     est.n_steps_discovery, est.n_steps_local, est.total_cost)])
        outputs.append(path)
        print(f"n_shots = {est.n_shots}  total_cost = {est.total_cost}")

    elif sub == "hessian":
        H, geom = _load_hamiltonian(cp, inputs)
        spec = _load_spec(cp, H)
        theta = _initial_theta(cp, spec, H, geom, seed, inputs)
        spectrum = diagnostics.hessian_spectrum(
            spec, theta, H,
            tol_neg=sec.getfloat("tol_neg", 1e-6),
            tol_zero=sec.getfloat("tol_zero", 1e-6))
        path = _out_name(out_dir, "hessian", seed)
        _write_csv(path, echo + [f"n_negative={spectrum.n_negative}",
                                 f"n_near_zero={spectrum.n_near_zero}"],
                   ["index", "eigenvalue"],
                   list(enumerate(spectrum.eigenvalues)))
        outputs.append(path)
        print(f"{len(spectrum.eigenvalues)} eigenvalues, "
              f"{spectrum.n_negative} negative, {spectrum.n_near_zero} near zero")

    elif sub == "gradvar":
        sizes = [int(s) for s in sec.get("sizes", "4,6,8").split(",")]
        depth = sec.getint("depth", 4)

        def builder(N):
            return pauli.QubitHamiltonian(
                N, (pauli.PauliTerm(1.0, {N // 2: "Z"}),), source="z-mid")

        rows = diagnostics.gradient_variance_scan(
            sizes, depth, builder, {"uniform": "uniform"},
            sec.getint("n_samples", 200), seed)
        path = _out_name(out_dir, "gradvar", seed)
        _write_csv(path, echo, ["n_qubits", "ensemble", "var", "stderr", "d"],
                   [(r.n_qubits, r.ensemble, r.variance, r.stderr, r.dim)
                    for r in rows])
        outputs.append(path)
        print(f"slope = {diagnostics.fit_log2_slope(rows, 'uniform'):.3f} "
              "(log2 variance per qubit)")

    elif sub == "tails":
        sec_h = cp["hamiltonian"]
        base = geometry.linear_chain(sec_h["element"], sec_h.getint("n_atoms"),
                                     sec_h.getfloat("spacing"))
        params = _chain_params(sec_h)
        spec = _load_spec(cp, None)
        strat_name = sec.get("strategy", "random")
        if strat_name == "random":
            strat = diagnostics.strategy_random()
        elif strat_name == "equivariant":
            if "model" not in sec:
                raise ConfigError("tail strategy 'equivariant' needs [diagnose] model")
            strat = diagnostics.strategy_equivariant(_load_model(sec["model"], inputs))
        else:
            raise ConfigError(f"unknown tail strategy {strat_name!r}")
        stats = diagnostics.init_error_tail(
            strat, base, lambda g: pauli.build_chain_model(g, params), spec,
            sec.getint("n_samples", 1000), sec.getfloat("sigma_pos", 0.05), seed)
        path = _out_name(out_dir, "tails", seed)
        _write_csv(path, echo + [f"strategy={strat_name}"],
                   ["quantile", "delta_e"],
                   sorted(stats.quantiles.items()))
        hist_path = _out_name(out_dir, "tails_samples", seed)
        _write_csv(hist_path, echo, ["sample_index", "delta_e"],
                   list(enumerate(stats.samples)))
        outputs += [path, hist_path]
        print(f"q99 = {stats.quantiles[99.0]:.6e} Ha over {stats.n} samples")

    elif sub == "disorder":
        sec_h = cp["hamiltonian"]
        base = geometry.linear_chain(sec_h["element"], sec_h.getint("n_atoms"),
                                     sec_h.getfloat("spacing"))
        params = _chain_params(sec_h)
        spec = _load_spec(cp, None)
        model = _load_model(sec["model"], inputs) if "model" in sec else None
        result = diagnostics.disorder_success_scan(
            [float(s) for s in sec.get("sigma_grid", "0.0,0.05,0.1").split(",")],
            [s.strip() for s in sec.get("strategies", "random,equivariant,hybrid").split(",")],
            sec.getint("budget", 400),
            sec.getfloat("threshold", diagnostics.CHEMICAL_ACCURACY),
            sec.getint("n_trials", 50), seed,
            base_geometry=base, chain_params=params, spec=spec, model=model)
        path = _out_name(out_dir, "disorder", seed)
        rows = []
        for name, res in sorted(result.strategies.items()):
            for i, s in enumerate(result.sigma_grid):
                rows.append((float(s), name, res.probability[i],
                             res.wilson_low[i], res.wilson_high[i]))
        _write_csv(path, echo + [f"budget={result.budget}",
                                 f"threshold={result.threshold}"],
                   ["sigma", "strategy", "success_prob", "wilson_low", "wilson_high"],
                   rows)
        outputs.append(path)
        for name in sorted(result.strategies):
            print(f"{name}: grid-average success = {result.grid_average(name):.3f}")

    elif sub == "landscape":
        H, geom = _load_hamiltonian(cp, inputs)
        spec = _load_spec(cp, H)
        theta = _initial_theta(cp, spec, H, geom, seed, inputs)
        i1 = sec.getint("dir1_index", 0)
        i2 = sec.getint("dir2_index", 1)
        d1 = np.zeros(spec.n_parameters); d1[i1] = 1.0
        d2 = np.zeros(spec.n_parameters); d2[i2] = 1.0
        h = sec.getfloat("half_range", np.pi)
        rows = diagnostics.landscape_grid(spec, theta, d1, d2, (h, h),
                                          sec.getint("resolution", 21), H)
        path = _out_name(out_dir, "landscape", seed)
        _write_csv(path, echo, ["a", "b", "energy"], rows)
        outputs.append(path)
        print(f"{len(rows)} grid points")

    elif sub == "benchmark":
        files = [f.strip() for f in sec.get("files", "").split(",") if f.strip()]
        if not files:
            raise ConfigError("[diagnose] benchmark needs files = <paths>")
        model = _load_model(sec["model"], inputs) if "model" in sec else None
        entries = []
        for f in files:
            path = Path(f)
            if not path.exists():
                raise ConfigError(f"benchmark file not found: {f}")
            inputs.append(path)
            H = pauli.parse_hamiltonian(path.read_text())
            entries.append((H, model, _load_spec(cp, H)))
        rows = diagnostics.benchmark_table(entries)
        path = _out_name(out_dir, "benchmark", seed)
        _write_csv(path, echo,
                   ["system", "delta_e_hf", "delta_e_precond", "improvement",
                    "complete"],
                   [(r.system, r.delta_e_hf, r.delta_e_precond, r.improvement,
                     r.complete) for r in rows])
        outputs.append(path)
        print(diagnostics.format_benchmark_table(rows))

    else:
        raise ConfigError(f"unknown diagnose subcommand {sub!r}")

    _write_manifest(out_dir, f"diagnose {sub}", seed, cp, inputs, outputs,
                    time.time() - t0)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqelab")
    parser.add_argument("--config", required=True, help="INI config file")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker cap (currently informational)")
    sub = parser.add_subparsers(dest="command", required=True)

    def _common(p):
        # accepted after the subcommand too; SUPPRESS keeps values given
        # before the subcommand from being overwritten
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--out", default=argparse.SUPPRESS)

    for name in ("energy", "optimize", "labels", "precond-train", "precond-adapt"):
        _common(sub.add_parser(name))
    diag = sub.add_parser("diagnose")
    diag.add_argument("subcommand",
                      choices=["gradvar", "hessian", "tails", "disorder",
                               "landscape", "shots", "benchmark"])
    _common(diag)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cp = _load_config(args.config)
        if args.command == "energy":
            return cmd_energy(cp, args)
        if args.command == "optimize":
            return cmd_optimize(cp, args)
        if args.command == "labels":
            return cmd_labels(cp, args)
        if args.command == "precond-train":
            return cmd_precond_train(cp, args, adapt=False)
        if args.command == "precond-adapt":
            return cmd_precond_train(cp, args, adapt=True)
        if args.command == "diagnose":
            return cmd_diagnose(cp, args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, pauli.HamiltonianParseError,
            pauli.HamiltonianValidationError, geometry.GeometryError,
            precond.PrecondError, FileNotFoundError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (optim.NonFiniteObjectiveError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
