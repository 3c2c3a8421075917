"""Measurement battery: gradient-variance regimes, Hessian basin membership,
disorder tail statistics, success scans, landscape grids, shot-cost model.

Everything here is deterministic given (config, seed); per-sample seeds are
derived through numpy SeedSequence so trials are independent and reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import circuit, geometry, optim, pauli, precond

HAAR_QUBIT_CAP = 6
HESSIAN_PARAM_CAP = 200
CHEMICAL_ACCURACY = 1.6e-3   # Ha


def _child_seed(*parts) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


# ---------------------------------------------------------------------------
# Haar-regime closed form

@dataclass(frozen=True)
class GeneratorSpec:
    """Half-Pauli generator of one circuit parameter."""
    parameter_index: int
    pauli: str          # 'X' | 'Y' | 'Z'
    qubit: int

    @classmethod
    def for_parameter(cls, spec: circuit.AnsatzSpec, k: int) -> "GeneratorSpec":
        p, q = spec.generator(k)
        return cls(k, p, q)


def haar_variance_prediction(H: pauli.QubitHamiltonian, generator: GeneratorSpec,
                             d: int) -> float:
    """Haar-ensemble gradient variance (tr_bar(G^2) - tr_bar(G)^2) / (d+1),
    with G = i[A, H], A the half-Pauli generator, tr_bar the normalized trace."""
    n = H.n_qubits
    if d != (1 << n):
        raise ValueError("d must equal 2**n_qubits")
    if n > HAAR_QUBIT_CAP:
        raise ValueError(f"dense trace computation capped at {HAAR_QUBIT_CAP} qubits")
    Hm = pauli.to_sparse(H).toarray()
    A = 0.5 * pauli.to_sparse(
        pauli.QubitHamiltonian(n, (pauli.PauliTerm(1.0, {generator.qubit: generator.pauli}),))
    ).toarray()
    G = 1j * (A @ Hm - Hm @ A)
    tr_g = np.trace(G) / d
    assert abs(tr_g) < 1e-10, "commutator trace should vanish by cyclicity"
    tr_g2 = np.trace(G @ G).real / d
    return float((tr_g2 - tr_g.real ** 2) / (d + 1))


# ---------------------------------------------------------------------------
# gradient-variance scan

@dataclass(frozen=True)
class BasinEnsemble:
    center: np.ndarray
    covariance: float | np.ndarray      # scalar sigma^2 or per-parameter diagonal

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        c = np.asarray(self.center, float)
        cov = self.covariance
        sig = np.sqrt(cov) * np.ones_like(c) if np.isscalar(cov) else np.sqrt(np.asarray(cov))
        return c + rng.normal(0.0, 1.0, size=c.shape) * sig


@dataclass(frozen=True)
class VarianceScanRow:
    n_qubits: int
    ensemble: str
    variance: float
    stderr: float
    dim: int
    parameter_index: int
    n_samples: int


def central_parameter(spec: circuit.AnsatzSpec) -> int:
    """Fixed probe parameter: y-slot of the middle qubit, middle layer."""
    return spec.index(spec.n_qubits // 2, spec.depth // 2, "y")


def gradient_variance_scan(sizes, depth: int, H_builder, ensembles: dict,
                           n_samples: int, seed: int) -> list[VarianceScanRow]:
    """Empirical Var(dE/dk) of the probe parameter per (size, ensemble).

    `ensembles` maps a name to either the string 'uniform' or a dict
    size -> BasinEnsemble.  The standard error uses the Gaussian
    approximation var * sqrt(2/(n-1)).
    """
    if n_samples < 2:
        raise ValueError("variance needs n_samples >= 2")
    rows = []
    for si, N in enumerate(sizes):
        H = H_builder(N)
        spec = circuit.AnsatzSpec(N, depth)
        k = central_parameter(spec)
        mat = pauli.to_sparse(H)
        shift = np.pi / 2
        for ei, (name, ens) in enumerate(sorted(ensembles.items())):
            rng = np.random.default_rng(_child_seed(seed, si, ei))
            grads = np.empty(n_samples)
            for s in range(n_samples):
                if isinstance(ens, str) and ens == "uniform":
                    theta = rng.uniform(-np.pi, np.pi, size=spec.n_parameters)
                elif isinstance(ens, dict):
                    if N not in ens:
                        raise ValueError(f"basin ensemble missing center for N={N}")
                    theta = ens[N].sample(rng)
                else:
                    raise ValueError(f"unknown ensemble spec {ens!r}")
                tp = theta.copy(); tp[k] += shift
                tm = theta.copy(); tm[k] -= shift
                grads[s] = 0.5 * (circuit.energy(spec, tp, H, _sparse=mat)
                                  - circuit.energy(spec, tm, H, _sparse=mat))
            var = float(np.var(grads, ddof=1))
            rows.append(VarianceScanRow(N, name, var,
                                        var * math.sqrt(2.0 / (n_samples - 1)),
                                        1 << N, k, n_samples))
    return rows


def fit_log2_slope(rows: list[VarianceScanRow], ensemble: str) -> float:
    """Least-squares slope of log2(variance) against qubit count."""
    pts = [(r.n_qubits, r.variance) for r in rows if r.ensemble == ensemble]
    if len(pts) < 2:
        raise ValueError("need at least two sizes to fit a slope")
    x = np.array([p[0] for p in pts], float)
    y = np.log2([max(p[1], 1e-300) for p in pts])
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------------------
# curvature sandwich (Theorem-S1-style bounds)

@dataclass(frozen=True)
class CurvatureBoundsReport:
    kappa_min: float
    kappa_max: float
    var_empirical: float
    lower_bound: float
    upper_bound: float
    passed: bool
    redundant_direction: bool
    n_redundant: int
    slack: float


def curvature_bounds_check(spec: circuit.AnsatzSpec, theta_star, sigma2,
                           H: pauli.QubitHamiltonian, n_samples: int,
                           direction=None, seed: int = 0, *,
                           tol_zero: float = 1e-6, slack: float = 2.0,
                           grad_tol: float = 1e-6) -> CurvatureBoundsReport:
    """Empirical check of kappa_m^2 lam_min <= Var(u.grad E) <= kappa_M^2 lam_max.

    theta_star must be a verified stationary point; the non-redundant subspace
    is spanned by Hessian eigenvectors with |eigenvalue| > tol_zero.
    Covariance is isotropic sigma2 on that subspace.
    """
    theta_star = np.asarray(theta_star, float)
    g0 = circuit.gradient(spec, theta_star, H)
    if np.linalg.norm(g0) > grad_tol:
        raise ValueError(f"theta_star not stationary: |grad| = {np.linalg.norm(g0):.3e}")
    hess = circuit.hessian(spec, theta_star, H)
    evals, evecs = np.linalg.eigh(hess)
    nr_mask = np.abs(evals) > tol_zero
    n_red = int(np.sum(~nr_mask))
    if not np.any(nr_mask):
        raise ValueError("all Hessian eigenvalues are redundant at tol_zero")
    V = evecs[:, nr_mask]
    kap = np.abs(evals[nr_mask])
    kappa_m, kappa_M = float(np.min(kap)), float(np.max(kap))

    rng = np.random.default_rng(seed)
    if direction is None:
        u = V @ rng.normal(size=V.shape[1])
        u /= np.linalg.norm(u)
        redundant = False
    else:
        u = np.asarray(direction, float)
        u = u / np.linalg.norm(u)
        redundant = np.linalg.norm(V.T @ u) < 0.5

    sig = math.sqrt(sigma2)
    samples = np.empty(n_samples)
    for s in range(n_samples):
        delta = V @ (sig * rng.normal(size=V.shape[1]))
        g = circuit.gradient(spec, theta_star + delta, H)
        samples[s] = float(u @ g)
    var = float(np.var(samples, ddof=1))
    lower = kappa_m ** 2 * sigma2 / slack
    upper = slack * kappa_M ** 2 * sigma2
    if redundant:
        passed = var <= 10.0 * tol_zero ** 2 * sigma2 + upper
    else:
        passed = lower <= var <= upper
    return CurvatureBoundsReport(kappa_m, kappa_M, var, lower, upper,
                                 passed, redundant, n_red, slack)


# ---------------------------------------------------------------------------
# Hessian spectra

@dataclass(frozen=True)
class HessianSpectrum:
    eigenvalues: np.ndarray   # ascending
    n_negative: int
    n_near_zero: int
    tol_neg: float
    tol_zero: float


def hessian_spectrum(spec: circuit.AnsatzSpec, theta0, H: pauli.QubitHamiltonian,
                     tol_neg: float = 1e-6, tol_zero: float = 1e-6) -> HessianSpectrum:
    if spec.n_parameters > HESSIAN_PARAM_CAP:
        raise ValueError(f"parameter count exceeds cost guard {HESSIAN_PARAM_CAP}")
    hess = circuit.hessian(spec, np.asarray(theta0, float), H)
    ev = np.sort(np.linalg.eigvalsh(hess))
    return HessianSpectrum(
        ev,
        int(np.sum(ev < -tol_neg)),
        int(np.sum(np.abs(ev) <= tol_zero)),
        tol_neg, tol_zero)


# ---------------------------------------------------------------------------
# initialization-error tails under disorder

@dataclass(frozen=True)
class TailStats:
    n: int
    quantiles: dict           # {50.0: .., 90.0: .., 99.0: .., 99.9: ..}
    exceedance: dict          # threshold -> count
    mean: float
    max: float
    samples: np.ndarray
    n_failed: int = 0


def strategy_random():
    """Uniform angles in (-pi, pi]."""
    def init(geom, H, spec, rng):
        return rng.uniform(-np.pi, np.pi, size=spec.n_parameters)
    return init


def strategy_equivariant(model: precond.PreconditionerModel):
    def init(geom, H, spec, rng):
        return precond.predict(model, geom, spec)
    return init


def strategy_replay(theta_star):
    """Replays a fixed label; sanity oracle for sigma_pos = 0."""
    theta_star = np.asarray(theta_star, float)

    def init(geom, H, spec, rng):
        return theta_star.copy()
    return init


def init_error_tail(strategy, base_geometry: geometry.MolecularGeometry,
                    system_builder, spec: circuit.AnsatzSpec, n_samples: int,
                    sigma_pos: float, seed: int,
                    thresholds=(1e-2, 1e-1, 1.0)) -> TailStats:
    """Distribution of Delta E = E(theta0) - E_exact over disorder samples.

    `system_builder(geom) -> QubitHamiltonian`; `strategy(geom, H, spec, rng)
    -> theta0`.  Per-sample failures are tolerated below 1% of n_samples.
    """
    if n_samples < 100:
        raise ValueError("tail statistics require n_samples >= 100")
    deltas = []
    failed = 0
    for s in range(n_samples):
        rng = np.random.default_rng(_child_seed(seed, s))
        try:
            geom = geometry.perturb_positions(base_geometry, sigma_pos,
                                              _child_seed(seed, s, 1))
            H = system_builder(geom)
            theta0 = strategy(geom, H, spec, rng)
            e0 = circuit.energy(spec, theta0, H)
            e_ref = pauli.exact_ground_state(H).ground_energy
            deltas.append(e0 - e_ref)
        except (ValueError, RuntimeError):
            failed += 1
            if failed > max(1, n_samples // 100):
                raise
    d = np.array(deltas)
    qs = {q: float(np.percentile(d, q)) for q in (50.0, 90.0, 99.0, 99.9)}
    return TailStats(len(d), qs, {t: int(np.sum(d > t)) for t in thresholds},
                     float(np.mean(d)), float(np.max(d)), d, failed)


# ---------------------------------------------------------------------------
# disorder success scan

def wilson_interval(successes: int, n: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class StrategyResult:
    successes: np.ndarray      # per sigma point
    probability: np.ndarray
    wilson_low: np.ndarray
    wilson_high: np.ndarray


@dataclass(frozen=True)
class DisorderScanResult:
    sigma_grid: np.ndarray
    strategies: dict           # name -> StrategyResult
    budget: int
    threshold: float
    n_trials: int

    def grid_average(self, name: str) -> float:
        return float(np.mean(self.strategies[name].probability))


KNOWN_STRATEGIES = ("random", "equivariant", "hybrid")


def disorder_success_scan(sigma_grid, strategies, budget: int, threshold: float,
                          n_trials: int, seed: int, *,
                          base_geometry: geometry.MolecularGeometry,
                          chain_params: pauli.ChainModelParams,
                          spec: circuit.AnsatzSpec,
                          model: precond.PreconditionerModel | None = None,
                          spsa_cfg: optim.SPSAConfig | None = None,
                          hybrid_restarts: int = 4,
                          hybrid_sigma: float = 0.2) -> DisorderScanResult:
    """Success probability of reaching Delta E < threshold within an SPSA
    evaluation budget, per disorder strength and initialization strategy.

    Strategies: 'random' (uniform angles), 'equivariant' (model prediction),
    'hybrid' (prediction plus SPSA restarts splitting the same budget).
    """
    sigma_grid = np.asarray(sigma_grid, float)
    if not strategies:
        raise ValueError("need at least one strategy")
    for s in strategies:
        if s not in KNOWN_STRATEGIES:
            raise ValueError(f"unknown strategy {s!r}")
    if any(s in ("equivariant", "hybrid") for s in strategies) and model is None:
        raise ValueError("equivariant/hybrid strategies require a model")
    if spsa_cfg is None:
        spsa_cfg = optim.SPSAConfig()

    counts = {s: np.zeros(len(sigma_grid), dtype=int) for s in strategies}
    for si, sigma in enumerate(sigma_grid):
        for trial in range(n_trials):
            geom = geometry.perturb_positions(base_geometry, float(sigma),
                                              _child_seed(seed, si, trial))
            H = pauli.build_chain_model(geom, chain_params)
            mat = pauli.to_sparse(H)
            e_exact = pauli.exact_ground_state(H).ground_energy

            def obj(t, _m=mat, _H=H):
                return circuit.energy(spec, t, _H, _sparse=_m)

            for sj, name in enumerate(sorted(strategies)):
                rng = np.random.default_rng(_child_seed(seed, si, trial, sj))
                run_seed = _child_seed(seed, si, trial, sj, 1)
                if name == "random":
                    theta0 = rng.uniform(-np.pi, np.pi, size=spec.n_parameters)
                    starts = [theta0]
                    steps = budget // 2
                elif name == "equivariant":
                    starts = [precond.predict(model, geom, spec)]
                    steps = budget // 2
                else:  # hybrid
                    base = precond.predict(model, geom, spec)
                    starts = [base] + [
                        base + rng.normal(0.0, hybrid_sigma, size=base.shape)
                        for _ in range(hybrid_restarts - 1)]
                    steps = budget // (2 * hybrid_restarts)
                best = np.inf
                for ri, th0 in enumerate(starts):
                    cfg = optim.SPSAConfig(
                        a=spsa_cfg.a, c=spsa_cfg.c, A=spsa_cfg.A,
                        alpha=spsa_cfg.alpha, gamma=spsa_cfg.gamma,
                        max_steps=steps, seed=run_seed + ri)
                    rep = optim.minimize_spsa(obj, th0, cfg)
                    best = min(best, obj(rep.final_parameters), obj(th0))
                if best - e_exact < threshold:
                    counts[name][si] += 1

    results = {}
    for name, c in counts.items():
        lows, highs = zip(*(wilson_interval(int(x), n_trials) for x in c))
        results[name] = StrategyResult(c, c / n_trials, np.array(lows), np.array(highs))
    return DisorderScanResult(sigma_grid, results, budget, threshold, n_trials)


# ---------------------------------------------------------------------------
# landscape grids

def landscape_grid(spec: circuit.AnsatzSpec, theta_center, dir1, dir2,
                   half_ranges, resolution: int,
                   H: pauli.QubitHamiltonian) -> list[tuple[float, float, float]]:
    """Energies on a resolution x resolution grid in the (dir1, dir2) plane.

    Directions must be orthonormal within 1e-8; resolution 1 degenerates to
    the single center point.  Rows are (a, b, E).
    """
    d1 = np.asarray(dir1, float)
    d2 = np.asarray(dir2, float)
    for d in (d1, d2):
        if abs(np.linalg.norm(d) - 1.0) > 1e-8:
            raise ValueError("directions must be unit norm")
    if abs(float(d1 @ d2)) > 1e-8:
        raise ValueError("directions must be orthogonal")
    theta_center = np.asarray(theta_center, float)
    h1, h2 = half_ranges
    axis1 = np.linspace(-h1, h1, resolution) if resolution > 1 else np.array([0.0])
    axis2 = np.linspace(-h2, h2, resolution) if resolution > 1 else np.array([0.0])
    mat = pauli.to_sparse(H)
    rows = []
    for a in axis1:
        for b in axis2:
            e = circuit.energy(spec, theta_center + a * d1 + b * d2, H, _sparse=mat)
            rows.append((float(a), float(b), e))
    return rows


# ---------------------------------------------------------------------------
# shot-cost model

@dataclass(frozen=True)
class ShotCostEstimate:
    n_shots: int
    epsilon: float
    hamiltonian_variance: float
    n_steps_discovery: int
    n_steps_local: int

    @property
    def total_cost(self) -> int:
        return self.n_shots * (self.n_steps_discovery + self.n_steps_local)


def shot_cost(variance: float, epsilon: float, n_steps_discovery: int,
              n_steps_local: int) -> ShotCostEstimate:
    """n_shots = ceil(Var(H)/eps^2); total proxy = n_shots * total steps."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    n_shots = math.ceil(variance / epsilon ** 2)
    return ShotCostEstimate(n_shots, epsilon, variance,
                            n_steps_discovery, n_steps_local)


@dataclass(frozen=True)
class AmortizationComparison:
    cost_standard: float
    cost_equivariant: float


def pes_amortization(n_geometries: int, t_inference: float, c_train: float,
                     n_shots: int, n_steps_discovery: int, n_steps_local: int,
                     t_shot: float = 1.0) -> AmortizationComparison:
    """Cost proxies for a K-point PES scan: standard VQE pays discovery at
    every point; the preconditioned protocol pays training once plus inference."""
    std = n_geometries * n_shots * (n_steps_discovery + n_steps_local) * t_shot
    eq = (c_train + n_geometries * t_inference
          + n_geometries * n_shots * n_steps_local * t_shot)
    return AmortizationComparison(std, eq)


# ---------------------------------------------------------------------------
# benchmark table

@dataclass(frozen=True)
class BenchmarkRow:
    system: str
    delta_e_hf: float | None
    delta_e_precond: float | None
    improvement: float | None
    e_ref: float | None
    complete: bool


def benchmark_table(entries) -> list[BenchmarkRow]:
    """Initialization-error table rows.

    `entries` is a list of (H, model_or_theta0, spec); model entries predict
    from H.geometry, array entries are used directly.  Missing metadata marks
    the row incomplete without dropping it.
    """
    rows = []
    for H, init, spec in entries:
        e_ref = H.reference_energies.get("fci")
        if e_ref is None:
            try:
                e_ref = pauli.exact_ground_state(H).ground_energy
            except ValueError:
                e_ref = None
        de_hf = None
        if H.hf_bitstring is not None and e_ref is not None:
            de_hf = pauli.basis_state_energy(H, H.hf_bitstring) - e_ref
        de_pc = None
        if e_ref is not None and init is not None:
            if isinstance(init, precond.PreconditionerModel):
                theta0 = precond.predict(init, H.geometry, spec,
                                         atom_qubit_map=H.atom_qubit_map)
            else:
                theta0 = np.asarray(init, float)
            de_pc = circuit.energy(spec, theta0, H) - e_ref
        improvement = None
        if de_hf is not None and de_pc is not None and de_pc != 0:
            improvement = de_hf / de_pc
        rows.append(BenchmarkRow(H.source or "?", de_hf, de_pc, improvement,
                                 e_ref, None not in (de_hf, de_pc)))
    return rows


def format_benchmark_table(rows: list[BenchmarkRow]) -> str:
    out = [f"{'System':<24}{'dE_HF (Ha)':>14}{'dE_Peq (Ha)':>14}{'Improv.':>10}"]
    for r in rows:
        hf = f"{r.delta_e_hf:.6f}" if r.delta_e_hf is not None else "--"
        pc = f"{r.delta_e_precond:.6f}" if r.delta_e_precond is not None else "--"
        im = f"{r.improvement:.1f}x" if r.improvement is not None else "--"
        out.append(f"{r.system:<24}{hf:>14}{pc:>14}{im:>10}")
    return "\n".join(out)
