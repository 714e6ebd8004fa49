"""Full-batch gradient descent training with restarts and truncation.

One training run starts from the structured initialization (random unit
directions, data-avoiding breakpoints, inner weights scaled by ``rho``,
zero outer weights) and applies exactly ``steps`` simultaneous gradient
steps with a fixed step size.  The estimator runs ``restarts`` independent
runs and keeps the one with the smallest penalized empirical risk; its
predictions are clamped to ``[-clip_bound, clip_bound]``.

Saturation fast path
--------------------
With the schedule ``rho = n^2 K`` every initial pre-activation has
magnitude of order n, so the logistic derivative at every training point is
at most ``exp(-margin)``, which is far below the resolution of the inner
weights.  Each step the loop bounds the inner-weight gradient by
``2 sqrt(F) max(1,|x|) max|a_k| max sigma'`` (Cauchy-Schwarz); when the
resulting update is provably smaller than a quarter ulp of every inner
weight, the subtraction would round to a no-op, so the loop skips it and
reuses the cached activations.  The produced iterates are identical (as
values) to naively applying :func:`gd_step` ``steps`` times; the skip only
elides arithmetic whose result is known in advance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .initialization import InitPlan, build_init_plan, build_initial_params
from .network import (
    NetworkParams,
    _inner_gradient,
    _outer_gradient,
    forward,
    gradient,
    penalized_risk,
    preactivations,
    sigmoid,
    truncate,
)
from .rng import derive_seed, make_rng

__all__ = [
    "TrainConfig",
    "CandidateModel",
    "TrainedModel",
    "TrainTrace",
    "TrainingError",
    "SelectionResult",
    "make_config",
    "theorem_schedule",
    "theorem_restarts",
    "gd_step",
    "train_once",
    "fit",
    "predict",
    "activation_margin",
    "drift_bound",
    "split_indices",
    "select_hyperparams",
    "model_to_dict",
    "model_from_dict",
]

_RESTART_TAG = 1
_CELL_TAG = 2
_SPLIT_TAG = 3


class TrainingError(RuntimeError):
    """Training produced a non-finite quantity (should be unreachable)."""


@dataclass
class TrainConfig:
    """All estimator knobs.

    ``step_size`` is the gradient step (the schedule sets 1 / (3 K r)),
    ``rho`` the inner-weight scale, ``steps`` the exact number of descent
    steps per run, ``beta`` the prediction clamp.
    """

    r: int
    K: int
    c1: float
    step_size: float
    rho: float
    steps: int
    restarts: int
    beta: float
    seed: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be at least 1")
        if self.K < 2:
            raise ValueError("K must be at least 2")
        for name in ("c1", "step_size", "rho", "beta"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")

    @property
    def neurons(self) -> int:
        return self.K * self.r


def make_config(
    n: int,
    r: int,
    K: int,
    *,
    c1: float = 1.0,
    c3: float = 1.0,
    restarts: int = 50,
    steps: int | None = None,
    steps_cap: int | None = None,
    seed: int = 0,
) -> TrainConfig:
    """Derive the sample-size-dependent knobs for given (r, K).

    beta = c3 log n, step size 1/(3 K r), rho = n^2 K and, unless
    overridden, steps = ceil(K n (log n)^2) clipped to ``steps_cap``.
    """
    if n < 2:
        raise ValueError("need a sample of size at least 2 (log n must be positive)")
    if steps is None:
        steps = math.ceil(K * n * math.log(n) ** 2)
    if steps_cap is not None:
        steps = min(steps, steps_cap)
    return TrainConfig(
        r=r,
        K=K,
        c1=c1,
        step_size=1.0 / (3.0 * K * r),
        rho=float(n) * float(n) * K,
        steps=steps,
        restarts=restarts,
        beta=c3 * math.log(n),
        seed=seed,
    )


def theorem_schedule(
    n: int,
    p: float,
    r: int,
    c3: float = 1.0,
    *,
    c1: float = 1.0,
    restarts: int = 50,
    steps_cap: int | None = None,
    seed: int = 0,
) -> TrainConfig:
    """Parameter schedule as a function of sample size and smoothness.

    K = max(2, ceil((n / (log n)^3)^(1/(2p+1)))); the remaining knobs follow
    :func:`make_config`.  ``restarts`` defaults to the practical 50; the
    asymptotic restart count is available from :func:`theorem_restarts`.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if not 0 < p <= 1:
        raise ValueError("smoothness p must lie in (0, 1]")
    K = max(2, math.ceil((n / math.log(n) ** 3) ** (1.0 / (2.0 * p + 1.0))))
    return make_config(
        n, r, K, c1=c1, c3=c3, restarts=restarts, steps_cap=steps_cap, seed=seed
    )


def theorem_restarts(n: int, p: float, r: int, d: int) -> int:
    """Asymptotic restart count ceil((log n)^(-3 r d/(2p+1)) n^(r d/(2p+1))).

    Documented for reference only; it grows polynomially in n with exponent
    r d / (2p + 1) and is impractical to run.
    """
    expo = r * d / (2.0 * p + 1.0)
    return math.ceil(math.log(n) ** (-3.0 * expo) * n**expo)


def gd_step(params: NetworkParams, data, c1: float, step_size: float) -> NetworkParams:
    """One simultaneous full-batch step: (a, b) - step_size * grad F(a, b)."""
    grad = gradient(params, data, c1)
    if not (np.all(np.isfinite(grad.outer)) and np.all(np.isfinite(grad.inner))):
        raise TrainingError("non-finite gradient")
    return NetworkParams(
        params.outer - step_size * grad.outer,
        params.inner - step_size * grad.inner,
    )


@dataclass
class TrainTrace:
    """Per-step diagnostics collected during one training run.

    ``inner_drift[t]`` is the largest absolute inner-weight change of step
    t; ``inner_drift_bound[t]`` the saturation bound computed from the risk,
    pre-activation margin and outer-weight norm at step t;
    ``total_inner_drift`` the largest |b^(final) - b^(0)| over all inner
    weights.  ``outer_path`` (if requested) holds the outer weights before
    every step and after the last.
    """

    inner_drift: np.ndarray = None
    inner_drift_bound: np.ndarray = None
    margins: np.ndarray = None
    risks: np.ndarray = None
    total_inner_drift: float = 0.0
    outer_path: np.ndarray = None
    record_outer: bool = False


@dataclass
class CandidateModel:
    """Result of a single run: weights, the plan they started from, risk."""

    params: NetworkParams
    plan: InitPlan | None
    penalized_risk: float
    steps_run: int


@dataclass
class TrainedModel:
    """Best-of-restarts network plus the prediction clamp."""

    best: CandidateModel
    beta: float
    config: TrainConfig | None


def _descend(params: NetworkParams, data, config: TrainConfig, trace: TrainTrace | None):
    """Run ``config.steps`` gradient steps in place; see module docstring."""
    n = data.n
    M = params.neurons
    c1 = config.c1
    lam = config.step_size
    y = data.ys
    X1 = np.hstack([np.ones((n, 1)), data.xs])
    max_abs_x = float(np.abs(data.xs).max())
    maxx1 = max(1.0, max_abs_x)
    a = params.outer.copy()
    B = params.inner.copy()

    def refresh(Bmat):
        Z = X1 @ Bmat.T
        S = sigmoid(Z)
        St = np.ascontiguousarray(S.T)
        D = S * (1.0 - S)
        Dmax = float(D.max())
        margin = float(np.abs(Z).min())
        ulp_quarter = 0.25 * float(np.spacing(np.abs(Bmat)).min())
        return S, St, D, Dmax, margin, ulp_quarter

    S, St, D, Dmax, margin, ulp_quarter = refresh(B)

    if trace is not None:
        steps = config.steps
        trace.inner_drift = np.zeros(steps)
        trace.inner_drift_bound = np.zeros(steps)
        trace.margins = np.zeros(steps)
        trace.risks = np.zeros(steps)
        if trace.record_outer:
            trace.outer_path = np.zeros((steps + 1, M + 1))
        B0 = B.copy()

    resid = np.empty(n)
    ga_buf = np.empty(M)
    for t in range(config.steps):
        np.dot(S, a[1:], out=resid)
        resid += a[0]
        resid -= y
        emp = float(resid @ resid) / n
        if not emp < math.inf:
            raise TrainingError(f"non-finite training risk at step {t}")
        amax = float(np.abs(a[1:]).max())
        ga0, ga = _outer_gradient(a, resid, St, n, c1, out=ga_buf)

        # Inner-weight update: skip when it provably rounds to a no-op.
        skip = amax == 0.0 or Dmax == 0.0 or emp == 0.0
        if not skip:
            cap = lam * 2.0 * math.sqrt(emp) * maxx1 * amax * Dmax * 1.01
            skip = 0.0 < cap < ulp_quarter
        drift = 0.0
        margin_t = margin  # margin of b^(t), before any update
        if not skip:
            gB = _inner_gradient(a, resid, D, X1, n, c1)
            B_new = B - lam * gB
            drift = float(np.abs(B_new - B).max())
            if not np.array_equal(B_new, B):
                B = B_new
                S, St, D, Dmax, margin, ulp_quarter = refresh(B)

        if trace is not None:
            total = emp + (c1 / n) * float(a @ a)
            trace.risks[t] = total
            trace.margins[t] = margin_t
            outer_sq = float(a[1:] @ a[1:])
            trace.inner_drift[t] = drift
            trace.inner_drift_bound[t] = drift_bound(
                total, margin_t, lam, outer_sq, max_abs_x
            )
            if trace.record_outer:
                trace.outer_path[t] = a

        a[0] -= lam * ga0
        a[1:] -= lam * ga

    if trace is not None:
        trace.total_inner_drift = float(np.abs(B - B0).max()) if config.steps else 0.0
        if trace.record_outer:
            trace.outer_path[config.steps] = a
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(B))):
        raise TrainingError("non-finite weights after training")
    return NetworkParams(a, B)


def train_once(
    data, config: TrainConfig, rng: np.random.Generator, trace: TrainTrace | None = None
) -> CandidateModel:
    """One full run: structured initialization, then exactly ``steps`` steps."""
    if data.n < 1:
        raise ValueError("training data must be nonempty")
    plan = build_init_plan(data, config.r, config.K, config.rho, rng)
    params = build_initial_params(plan, config.r, config.K, data.dim)
    final = _descend(params, data, config, trace)
    risk = penalized_risk(final, data, config.c1).total
    return CandidateModel(final, plan, risk, config.steps)


def fit(data, config: TrainConfig) -> TrainedModel:
    """Best of ``config.restarts`` independent runs by penalized risk.

    Restart i draws its directions from a fresh stream seeded with
    (config.seed, 1, i), so runs are reproducible and independent of any
    execution order; ties keep the lowest restart index.
    """
    best = None
    for i in range(config.restarts):
        rng = make_rng(config.seed, _RESTART_TAG, i)
        cand = train_once(data, config, rng)
        if best is None or cand.penalized_risk < best.penalized_risk:
            best = cand
    return TrainedModel(best, config.beta, config)


def predict(model: TrainedModel, x):
    """Truncated network value at x (single point or batch)."""
    return truncate(forward(model.best.params, x), model.beta)


def activation_margin(params: NetworkParams, data) -> float:
    """Smallest |pre-activation| over all training points and neurons."""
    return float(np.abs(preactivations(params, data.xs)).min())


def drift_bound(
    risk: float, margin: float, step_size: float, outer_norm_sq: float, max_abs_x: float
) -> float:
    """Saturation bound on a single inner-weight gradient step.

    step_size * 2 * sqrt(risk) * max(1, max_abs_x) * sqrt(outer_norm_sq)
    * exp(-margin / 2).  Large margins kill the bound exponentially; a zero
    step size or zero outer weights make it vanish.
    """
    if min(risk, margin, step_size, outer_norm_sq, max_abs_x) < 0:
        raise ValueError("all arguments must be non-negative")
    return (
        step_size
        * 2.0
        * math.sqrt(risk)
        * max(1.0, max_abs_x)
        * math.sqrt(outer_norm_sq)
        * math.exp(-margin / 2.0)
    )


def split_indices(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Shuffled 80/20 split: first ceil(0.8 n) indices learn, rest test."""
    if n < 5:
        raise ValueError("need at least 5 rows to split")
    perm = rng.permutation(n)
    n_learn = math.ceil(0.8 * n)
    return perm[:n_learn], perm[n_learn:]


@dataclass
class SelectionResult:
    """Outcome of split-based hyperparameter selection.

    ``config`` carries the winning (r, K) rebuilt for the full sample size;
    ``model`` is the winning trained network itself (fitted on the learning
    split and validated on the held-out split), which is what the
    simulation study evaluates; ``cells`` lists (r, K, test_risk) in the
    order visited.
    """

    config: TrainConfig
    model: TrainedModel
    cells: list = field(default_factory=list)


def select_hyperparams(
    data,
    r_grid,
    K_grid,
    rng: np.random.Generator | None = None,
    *,
    c1: float = 1.0,
    c3: float = 1.0,
    restarts: int = 50,
    steps_cap: int | None = None,
    seed: int = 0,
) -> SelectionResult:
    """Choose (r, K) by an 80/20 split of the data.

    Every grid cell is fitted on the learning split and scored by its
    empirical L2 risk on the held-out split; the minimizer wins, with ties
    going to smaller K and then smaller r.  Each cell uses an independent
    restart seed derived from (seed, 2, cell index).
    """
    if not len(r_grid) or not len(K_grid):
        raise ValueError("hyperparameter grids must be nonempty")
    if rng is None:
        rng = make_rng(seed, _SPLIT_TAG)
    learn_idx, test_idx = split_indices(data.n, rng)
    learn = data.subset(learn_idx)
    test_xs = data.xs[test_idx]
    test_ys = data.ys[test_idx]

    cells = sorted((int(K), int(r)) for K in K_grid for r in r_grid)
    best = None
    visited = []
    for idx, (K, r) in enumerate(cells):
        cfg = make_config(
            learn.n,
            r,
            K,
            c1=c1,
            c3=c3,
            restarts=restarts,
            steps_cap=steps_cap,
            seed=derive_seed(seed, _CELL_TAG, idx),
        )
        model = fit(learn, cfg)
        resid = predict(model, test_xs) - test_ys
        test_risk = float(resid @ resid) / len(test_ys)
        visited.append((r, K, test_risk))
        if best is None or test_risk < best[0]:
            best = (test_risk, K, r, model)
    _, K_win, r_win, model_win = best
    full_cfg = make_config(
        data.n, r_win, K_win, c1=c1, c3=c3, restarts=restarts, steps_cap=steps_cap, seed=seed
    )
    return SelectionResult(full_cfg, model_win, visited)


def model_to_dict(model: TrainedModel) -> dict:
    """JSON-ready document: {d, r, K, beta, outer, inner} plus a config echo."""
    params = model.best.params
    cfg = model.config
    doc = {
        "d": params.dim,
        "r": cfg.r if cfg else None,
        "K": cfg.K if cfg else None,
        "beta": float(model.beta),
        "outer": [float(v) for v in params.outer],
        "inner": [[float(v) for v in row] for row in params.inner],
        "penalized_risk": float(model.best.penalized_risk),
    }
    if cfg is not None:
        doc["config"] = asdict(cfg)
    return doc


def model_from_dict(doc: dict) -> TrainedModel:
    """Rebuild a predict-ready model from :func:`model_to_dict` output."""
    params = NetworkParams(np.asarray(doc["outer"]), np.asarray(doc["inner"]))
    if params.dim != doc["d"]:
        raise ValueError("inner weight width disagrees with the declared dimension")
    cfg = TrainConfig(**doc["config"]) if "config" in doc else None
    cand = CandidateModel(params, None, float(doc.get("penalized_risk", math.nan)), 0)
    return TrainedModel(cand, float(doc["beta"]), cfg)
