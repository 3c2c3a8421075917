"""Optimizer suite: L-BFGS with strong Wolfe line search, SPSA, basin hopping,
and the decoupled-weight-decay (AdamW-style) trainer used by the preconditioner.

All stochastic routines are pure functions of (inputs, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class NonFiniteObjectiveError(RuntimeError):
    """Objective returned NaN/inf; carries the offending point."""

    def __init__(self, theta, value):
        super().__init__(f"objective returned non-finite value {value!r}")
        self.theta = np.array(theta)
        self.value = value


@dataclass
class OptimizerReport:
    trace: list[tuple[int, float]]            # (evaluation_count, energy)
    final_parameters: np.ndarray
    termination: str                          # 'tolerance' | 'max_evals' | 'max_steps'
    evaluations_used: int

    @property
    def final_energy(self) -> float:
        return self.trace[-1][1]


@dataclass(frozen=True)
class SPSAConfig:
    a: float = 0.1
    c: float = 0.1
    A: float = 10.0
    alpha: float = 0.602
    gamma: float = 0.101
    max_steps: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.a <= 0 or self.c <= 0:
            raise ValueError("a and c must be positive")
        if not (0 < self.alpha <= 1 and 0 < self.gamma <= 1):
            raise ValueError("alpha and gamma must lie in (0, 1]")


@dataclass(frozen=True)
class BasinHoppingConfig:
    temperature: float = 0.5
    hop_steps: int = 100
    restarts: int = 10
    hop_scale: float = 0.5     # rad; unspecified upstream, documented knob
    seed: int = 0
    local_tol: float = 1e-9
    local_max_evals: int = 2000


@dataclass(frozen=True)
class TrainOptimConfig:
    weight_decay: float = 1e-4
    lr_start: float = 1e-3
    lr_end: float = 1e-6
    warmup_steps: int = 10
    total_steps: int = 1000

    def __post_init__(self):
        if not (self.lr_start > self.lr_end > 0):
            raise ValueError("need lr_start > lr_end > 0")


# ---------------------------------------------------------------------------
# L-BFGS with strong Wolfe line search

_WOLFE_C1 = 1e-4
_WOLFE_C2 = 0.9
_LBFGS_MEMORY = 10


def _two_loop(g, s_list, y_list):
    q = g.copy()
    alphas = []
    for s, y in zip(reversed(s_list), reversed(y_list)):
        rho = 1.0 / float(y @ s)
        a = rho * float(s @ q)
        alphas.append((a, rho))
        q -= a * y
    if s_list:
        s, y = s_list[-1], y_list[-1]
        q *= float(s @ y) / float(y @ y)
    for (a, rho), s, y in zip(reversed(alphas), s_list, y_list):
        b = rho * float(y @ q)
        q += (a - b) * s
    return q


def _line_search_wolfe(f, fprime, x, p, f0, g0, max_iter=25):
    """Strong Wolfe (c1=1e-4, c2=0.9) bracket-and-zoom; returns (alpha, f_new,
    g_new, n_evals) or None on failure."""
    d0 = float(g0 @ p)
    if d0 >= 0:
        return None
    evals = 0

    def phi(a):
        nonlocal evals
        evals += 1
        return f(x + a * p)

    def dphi(a):
        g = fprime(x + a * p)
        return float(g @ p), g

    a_prev, f_prev = 0.0, f0
    a_cur = 1.0
    f_lo = f0
    for it in range(max_iter):
        f_cur = phi(a_cur)
        if not math.isfinite(f_cur):
            a_cur *= 0.5
            continue
        if f_cur > f0 + _WOLFE_C1 * a_cur * d0 or (it > 0 and f_cur >= f_prev):
            return _zoom(phi, dphi, a_prev, a_cur, f_prev, f0, d0, evals, x, p, f)
        d_cur, g_cur = dphi(a_cur)
        if abs(d_cur) <= -_WOLFE_C2 * d0:
            return a_cur, f_cur, g_cur, evals
        if d_cur >= 0:
            return _zoom(phi, dphi, a_cur, a_prev, f_cur, f0, d0, evals, x, p, f)
        a_prev, f_prev = a_cur, f_cur
        a_cur *= 2.0
    return None


def _zoom(phi, dphi, a_lo, a_hi, f_lo, f0, d0, evals, x, p, f, max_iter=25):
    for _ in range(max_iter):
        a = 0.5 * (a_lo + a_hi)
        f_a = phi(a)
        evals += 1
        if f_a > f0 + _WOLFE_C1 * a * d0 or f_a >= f_lo:
            a_hi = a
        else:
            d_a, g_a = dphi(a)
            if abs(d_a) <= -_WOLFE_C2 * d0:
                return a, f_a, g_a, evals
            if d_a * (a_hi - a_lo) >= 0:
                a_hi = a_lo
            a_lo, f_lo = a, f_a
        if abs(a_hi - a_lo) < 1e-16:
            break
    return None


def minimize_lbfgs(objective, grad, theta0, tol: float = 1e-9,
                   max_evals: int = 5000, max_steps: int = 10000) -> OptimizerReport:
    """Unconstrained L-BFGS (memory 10, strong Wolfe line search).

    Terminates when successive energies differ by less than `tol`, when the
    gradient inf-norm drops below `tol`, or when the budget is exhausted.
    Line-search failures fall back to a single backtracked steepest-descent
    step.  Non-finite objective values abort with NonFiniteObjectiveError.
    """
    x = np.array(theta0, dtype=float)
    evals = 0

    def f(t):
        nonlocal evals
        evals += 1
        v = float(objective(t))
        if not math.isfinite(v):
            raise NonFiniteObjectiveError(t, v)
        return v

    fx = f(x)
    g = np.asarray(grad(x), dtype=float)
    trace = [(evals, fx)]
    best_x, best_f = x.copy(), fx
    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    termination = "max_steps"

    for _ in range(max_steps):
        if np.max(np.abs(g)) < tol:
            termination = "tolerance"
            break
        if evals >= max_evals:
            termination = "max_evals"
            break
        p = -_two_loop(g, s_list, y_list)
        ls = _line_search_wolfe(f, lambda t: np.asarray(grad(t), dtype=float),
                                x, p, fx, g)
        if ls is None:
            # steepest-descent fallback with simple backtracking
            step = 1.0 / max(1.0, np.linalg.norm(g))
            accepted = False
            for _ in range(30):
                cand = x - step * g
                fc = f(cand)
                if fc < fx:
                    x_new, f_new = cand, fc
                    g_new = np.asarray(grad(x_new), dtype=float)
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                termination = "tolerance"
                break
            s_list.clear()
            y_list.clear()
        else:
            alpha, f_new, g_new, _ = ls
            x_new = x + alpha * p
            s, y = x_new - x, g_new - g
            if float(s @ y) > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
                s_list.append(s)
                y_list.append(y)
                if len(s_list) > _LBFGS_MEMORY:
                    s_list.pop(0)
                    y_list.pop(0)
        df = abs(fx - f_new)
        x, fx, g = x_new, f_new, g_new
        trace.append((evals, fx))
        if fx < best_f:
            best_x, best_f = x.copy(), fx
        if df < tol:
            termination = "tolerance"
            break
    else:
        termination = "max_steps"

    if best_f < fx:   # descent guarantee: never report worse than best seen
        x, fx = best_x, best_f
        trace.append((evals, fx))
    return OptimizerReport(trace, x, termination, evals)


# ---------------------------------------------------------------------------
# SPSA

def minimize_spsa(objective_noisy, theta0, cfg: SPSAConfig) -> OptimizerReport:
    """First-order SPSA with decaying schedules a_k = a/(k+A)^alpha and
    c_k = c/(k+1)^gamma, Rademacher simultaneous perturbations."""
    rng = np.random.default_rng(cfg.seed)
    x = np.array(theta0, dtype=float)
    trace: list[tuple[int, float]] = []
    evals = 0
    c_scale = 1.0
    halved = False
    for k in range(cfg.max_steps):
        a_k = cfg.a / (k + cfg.A) ** cfg.alpha
        c_k = c_scale * cfg.c / (k + 1) ** cfg.gamma
        delta = rng.choice([-1.0, 1.0], size=x.shape)
        fp = float(objective_noisy(x + c_k * delta))
        fm = float(objective_noisy(x - c_k * delta))
        evals += 2
        if not (math.isfinite(fp) and math.isfinite(fm)):
            if not halved:
                c_scale *= 0.5
                halved = True
            continue
        ghat = (fp - fm) / (2.0 * c_k) * (1.0 / delta)
        x = x - a_k * ghat
        trace.append((evals, 0.5 * (fp + fm)))
    if not trace:
        trace = [(evals, float(objective_noisy(x)))]
        evals += 1
    return OptimizerReport(trace, x, "max_steps", evals)


def spsa_step_size(k: int, cfg: SPSAConfig) -> float:
    return cfg.a / (k + cfg.A) ** cfg.alpha


# ---------------------------------------------------------------------------
# basin hopping

def basin_hopping(objective, grad, theta0, cfg: BasinHoppingConfig) -> OptimizerReport:
    """Metropolis-accepted hops with L-BFGS refinement at every hop.

    Restart r uses seed cfg.seed + r and starts from theta0.  Returns the best
    local minimum over all restarts and hops; the trace records cumulative
    evaluation counts at each accepted local minimum.
    """
    theta0 = np.array(theta0, dtype=float)
    best_x, best_f = None, np.inf
    trace: list[tuple[int, float]] = []
    total_evals = 0

    for r in range(cfg.restarts):
        rng = np.random.default_rng(cfg.seed + r)
        try:
            rep = minimize_lbfgs(objective, grad, theta0,
                                 tol=cfg.local_tol, max_evals=cfg.local_max_evals)
        except NonFiniteObjectiveError:
            continue
        total_evals += rep.evaluations_used
        cur_x, cur_f = rep.final_parameters, rep.final_energy
        if cur_f < best_f:
            best_x, best_f = cur_x.copy(), cur_f
            trace.append((total_evals, best_f))
        for _ in range(cfg.hop_steps):
            prop = cur_x + rng.uniform(-cfg.hop_scale, cfg.hop_scale, size=cur_x.shape)
            try:
                rep = minimize_lbfgs(objective, grad, prop,
                                     tol=cfg.local_tol, max_evals=cfg.local_max_evals)
            except NonFiniteObjectiveError:
                continue   # skipped hop
            total_evals += rep.evaluations_used
            f_new = rep.final_energy
            if f_new < best_f:
                best_x, best_f = rep.final_parameters.copy(), f_new
                trace.append((total_evals, best_f))
            dE = f_new - cur_f
            if dE <= 0:
                accept = True
            elif cfg.temperature <= 0:
                accept = False
            else:
                accept = rng.random() < math.exp(-dE / cfg.temperature)
            if accept:
                cur_x, cur_f = rep.final_parameters, f_new

    if best_x is None:
        raise NonFiniteObjectiveError(theta0, float("nan"))
    if not trace:
        trace = [(total_evals, best_f)]
    return OptimizerReport(trace, best_x, "max_steps", total_evals)


# ---------------------------------------------------------------------------
# AdamW-style trainer

_ADAM_B1, _ADAM_B2, _ADAM_EPS = 0.9, 0.999, 1e-8


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def learning_rate(step_index: int, cfg: TrainOptimConfig) -> float:
    """Linear warmup to lr_start, then cosine decay to lr_end at total_steps."""
    k = step_index
    if cfg.warmup_steps > 0 and k < cfg.warmup_steps:
        return cfg.lr_start * k / cfg.warmup_steps
    span = max(cfg.total_steps - cfg.warmup_steps, 1)
    frac = min(max(k - cfg.warmup_steps, 0) / span, 1.0)
    return cfg.lr_end + 0.5 * (cfg.lr_start - cfg.lr_end) * (1 + math.cos(math.pi * frac))


def decayed_weight_gradient_step(weights: dict, grads: dict, step_index: int,
                                 cfg: TrainOptimConfig, state: AdamState) -> dict:
    """One AdamW update (beta1=0.9, beta2=0.999, eps=1e-8), decoupled decay.

    `weights`/`grads` are dicts of numpy arrays with matching keys and shapes.
    Returns new weights; `state` is updated in place.  Non-finite gradients
    skip the update and leave weights and state untouched.
    """
    for key, g in grads.items():
        if not np.all(np.isfinite(g)):
            return {k: w.copy() for k, w in weights.items()}
    lr = learning_rate(step_index, cfg)
    t = step_index + 1
    new = {}
    for key, w in weights.items():
        g = grads[key]
        if key not in state.m:
            state.m[key] = np.zeros_like(w)
            state.v[key] = np.zeros_like(w)
        state.m[key] = _ADAM_B1 * state.m[key] + (1 - _ADAM_B1) * g
        state.v[key] = _ADAM_B2 * state.v[key] + (1 - _ADAM_B2) * g * g
        mhat = state.m[key] / (1 - _ADAM_B1 ** t)
        vhat = state.v[key] / (1 - _ADAM_B2 ** t)
        new[key] = (w * (1 - lr * cfg.weight_decay)
                    - lr * mhat / (np.sqrt(vhat) + _ADAM_EPS))
    return new


# ---------------------------------------------------------------------------
# shot-noise emulation

def shot_noise_wrapper(objective, H_variance: float, n_shots: int, seed: int):
    """Wrap an exact objective with Normal(0, Var(H)/n_shots) additive noise.

    The noise stream is seeded and advances one draw per call, so a fixed
    seed reproduces the same noise sequence.
    """
    if n_shots < 1:
        raise ValueError("n_shots must be >= 1")
    rng = np.random.default_rng(seed)
    sigma = math.sqrt(H_variance / n_shots)

    def noisy(theta):
        return float(objective(theta)) + (rng.normal(0.0, sigma) if sigma > 0 else 0.0)

    return noisy
