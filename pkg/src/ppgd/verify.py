"""Numerical certification suites.

Each suite stresses one quantitative guarantee of the package on randomized
or exhaustive inputs and returns a machine-readable certificate dict with a
``passed`` flag and the observed extremes.  The CLI ``verify`` subcommand
runs them and exits nonzero if any certificate fails.

Suites
------
linear
    Per-step descent and geometric gap contraction of penalized linear
    least squares under gradient descent with step 1/L, against the
    closed-form optimum, on randomized problems.
approx
    (a) the sigmoid-vs-step gap is bounded by exp(-|x|) on a dense grid;
    (b) the sup error of the sigmoid step approximant of smooth ridge
    functions stays below the analytic bound across a (K, rho) sweep.
init
    The breakpoint-grid inequalities, the projection-distance guarantee
    and the scaled pre-activation margin, on randomized datasets.
drift
    With the schedule's inner-weight scale, a full-budget training run
    keeps every inner weight frozen: total drift below 1e-8 and every
    per-step drift below the saturation bound.
"""

from __future__ import annotations

import math

import numpy as np

from .approx import (
    RidgeTarget,
    approx_error_bound,
    build_step_approximant,
    indicator_gap,
    sup_gap,
)
from .datasets import SyntheticSpec, generate_sample
from .initialization import build_initial_params, choose_breakpoints, sample_direction, InitPlan
from .linear_gd import CertificationError, LinearProblem, run_linear_gd
from .rng import make_rng
from .training import TrainTrace, activation_margin, make_config, train_once
from .network import preactivations

__all__ = [
    "verify_linear_gd",
    "verify_approx",
    "verify_init",
    "verify_drift",
    "run_suites",
    "APPROX_SWEEP_TARGETS",
]


def verify_linear_gd(problems: int = 100, steps: int = 150, seed: int = 2024) -> dict:
    """Certify descent and contraction on randomized penalized problems."""
    rng = make_rng(seed)
    max_descent = -math.inf
    max_contract = -math.inf
    failures = 0
    for _ in range(problems):
        n = int(rng.integers(2, 51))
        k = int(rng.integers(1, 21))
        B = rng.standard_normal((n, k))
        y = rng.standard_normal(n)
        c1 = float(rng.uniform(0.1, 3.0))
        a0 = rng.standard_normal(k)
        prob = LinearProblem(B, y, c1)
        try:
            cert = run_linear_gd(prob, a0, steps)
            max_descent = max(max_descent, cert.max_descent_violation)
            max_contract = max(max_contract, cert.max_contraction_violation)
        except CertificationError:
            failures += 1
    return {
        "check": "linear_descent_and_contraction",
        "problems": problems,
        "steps": steps,
        "failures": failures,
        "max_descent_violation": max_descent,
        "max_contraction_violation": max_contract,
        "passed": failures == 0,
    }


# (name, callable, smoothness p, Hoelder constant C) for the sweep targets;
# all are (p, C)-smooth on [-sqrt(d) A, sqrt(d) A] for A = d = 1.
APPROX_SWEEP_TARGETS = (
    ("sin", np.sin, 1.0, 1.0),
    ("sqrt_abs", lambda u: np.sqrt(np.abs(u)), 0.5, 1.0),
    ("identity", lambda u: np.asarray(u, dtype=np.float64), 1.0, 1.0),
)


def verify_approx(
    grid_lo: float = -50.0,
    grid_hi: float = 50.0,
    grid_step: float = 1e-3,
    K_values=(5, 20, 80),
    rho_values=(1e2, 1e4, 1e8),
    sup_points: int = 100_000,
) -> tuple[dict, list]:
    """Certify the indicator gap bound and the step-approximation bound.

    Returns the certificate and the sweep rows
    (target, K, rho, empirical sup, analytic bound).
    """
    xs = np.arange(round((grid_hi - grid_lo) / grid_step) + 1) * grid_step + grid_lo
    gaps = indicator_gap(xs)
    bounds = np.exp(-np.abs(xs))
    gap_violations = int(np.count_nonzero(gaps > bounds))

    a_bound, d = 1.0, 1
    s = math.sqrt(d) * a_bound
    rows = []
    sweep_violations = 0
    for name, g, p, C in APPROX_SWEEP_TARGETS:
        target = RidgeTarget(g, p, C)
        for K in K_values:
            bks = choose_breakpoints([], K, 0, a_bound, d)
            for rho in rho_values:
                approx = build_step_approximant(target, bks, rho)
                emp = sup_gap(approx, g, -s, s, points=sup_points)
                bound = approx_error_bound(p, C, K, a_bound, d, rho, 0)
                rows.append((name, K, rho, emp, bound))
                if emp > bound:
                    sweep_violations += 1
    cert = {
        "check": "step_approximation_bounds",
        "indicator_grid_points": int(xs.size),
        "indicator_violations": gap_violations,
        "sweep_cells": len(rows),
        "sweep_violations": sweep_violations,
        "passed": gap_violations == 0 and sweep_violations == 0,
    }
    return cert, rows


def verify_init(datasets: int = 1000, seed: int = 7) -> dict:
    """Certify the breakpoint inequalities and the pre-activation margin."""
    rng = make_rng(seed)
    violations = {
        "first_breakpoint": 0,
        "last_breakpoint": 0,
        "min_spacing": 0,
        "max_spacing": 0,
        "projection_distance": 0,
        "margin": 0,
    }
    for _ in range(datasets):
        n = int(rng.integers(1, 201))
        d = int(rng.integers(1, 7))
        K = int(rng.integers(2, 21))
        a_bound = float(rng.uniform(1.0, 3.0))
        xs = rng.uniform(-a_bound, a_bound, (n, d))
        direction = sample_direction(d, rng)
        proj = xs @ direction
        s = math.sqrt(d) * a_bound
        # projections can exceed sqrt(d)*A by rounding only if |x| = A exactly
        proj = np.clip(proj, -s, s)
        bks = choose_breakpoints(proj, K, n, a_bound, d)
        guard = s / ((n + 1) * (K - 1))
        diffs = np.diff(bks)
        if not bks[0] <= -s:
            violations["first_breakpoint"] += 1
        if not bks[-1] >= s - 4.0 * s / (K - 1):
            violations["last_breakpoint"] += 1
        if not np.all(diffs >= guard):
            violations["min_spacing"] += 1
        if not np.all(diffs <= 4.0 * s / (K - 1)):
            violations["max_spacing"] += 1
        if not np.abs(proj[:, None] - bks[None, :]).min() >= guard:
            violations["projection_distance"] += 1

        rho = float(n) * n * K
        plan = InitPlan(direction[None, :], bks[None, :], rho)
        params = build_initial_params(plan, 1, K, d)
        margin = float(np.abs(preactivations(params, xs)).min())
        if not margin >= rho * guard:
            violations["margin"] += 1
    total = sum(violations.values())
    return {
        "check": "breakpoint_construction",
        "datasets": datasets,
        "violations": violations,
        "passed": total == 0,
    }


def verify_drift(
    n: int = 100, K: int = 5, r: int = 1, noise: float = 0.05, seed: int = 123
) -> dict:
    """Certify the inner-weight freeze over a full-budget training run."""
    data = generate_sample(SyntheticSpec("m1", noise), n, seed)
    config = make_config(n, r, K, seed=seed)
    trace = TrainTrace()
    cand = train_once(data, config, make_rng(seed, 99), trace)
    per_step_ok = bool(np.all(trace.inner_drift <= trace.inner_drift_bound))
    init_params = build_initial_params(cand.plan, r, K, data.dim)
    margin0 = activation_margin(init_params, data)
    guard = math.sqrt(data.dim) * data.a_bound / ((n + 1) * (K - 1))
    return {
        "check": "inner_weight_freeze",
        "n": n,
        "K": K,
        "steps": config.steps,
        "rho": config.rho,
        "initial_margin": margin0,
        "margin_guarantee": config.rho * guard,
        "total_inner_drift": trace.total_inner_drift,
        "max_per_step_drift": float(trace.inner_drift.max()),
        "per_step_bound_ok": per_step_ok,
        "passed": trace.total_inner_drift <= 1e-8
        and per_step_ok
        and margin0 >= config.rho * guard,
    }


def run_suites(names=("linear", "approx", "init", "drift")) -> tuple[dict, list]:
    """Run the requested suites; returns (certificates, approx sweep rows)."""
    certs = {}
    sweep_rows = []
    for name in names:
        if name == "linear":
            certs["linear"] = verify_linear_gd()
        elif name == "approx":
            cert, sweep_rows = verify_approx()
            certs["approx"] = cert
        elif name == "init":
            certs["init"] = verify_init()
        elif name == "drift":
            certs["drift"] = verify_drift()
        else:
            raise ValueError(f"unknown suite {name!r}")
    certs["passed"] = all(c["passed"] for c in certs.values() if isinstance(c, dict))
    return certs, sweep_rows
