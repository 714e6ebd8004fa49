"""Step-function approximation of smooth ridge functions by sigmoid sums.

Two computable facts are packaged here:

* the gap between the logistic function and the unit step is at most
  ``exp(-|z|)`` pointwise, hence ``|sigmoid(c (x - b)) - 1[x >= b]|
  <= exp(-c |x - b|)`` for any steepness c > 0;
* a Hoelder-continuous g on ``[-sqrt(d) A, sqrt(d) A]`` is tracked by the
  telescoping sigmoid sum built on a breakpoint grid, with worst-case error

      3 C (4 A sqrt(d))^p / (K-1)^p
      + C (4 A sqrt(d))^p (K-1)^(1-p) exp(-rho sqrt(d) A / ((n+1)(K-1))).

The gap functions return the mathematically exact gap evaluated in its
cancellation-free form (``sigmoid(-|z|)``); computing ``1 - sigmoid(z)`` by
subtraction would round up to a full ulp of 1 near saturation and falsely
exceed the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .network import sigmoid

__all__ = [
    "RidgeTarget",
    "StepApproximant",
    "indicator_gap",
    "sigmoid_indicator_gap",
    "build_step_approximant",
    "approx_error_bound",
    "sup_gap",
]


def indicator_gap(x):
    """Exact |sigmoid(x) - 1[x >= 0]|, evaluated as sigmoid(-|x|)."""
    x = np.asarray(x, dtype=np.float64)
    return sigmoid(-np.abs(x))


def sigmoid_indicator_gap(c: float, b: float, x):
    """Exact |sigmoid(c (x - b)) - 1[x >= b]| for steepness c > 0."""
    if not c > 0:
        raise ValueError("steepness c must be positive")
    x = np.asarray(x, dtype=np.float64)
    return sigmoid(-np.abs(c * (x - b)))


@dataclass
class RidgeTarget:
    """A univariate target g with Hoelder smoothness (p, C) and a direction."""

    g: Callable
    p: float
    C: float
    direction: np.ndarray | None = None

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError("smoothness exponent p must lie in (0, 1]")
        if self.C <= 0:
            raise ValueError("Hoelder constant C must be positive")
        if self.direction is not None:
            self.direction = np.asarray(self.direction, dtype=np.float64)


@dataclass
class StepApproximant:
    """Telescoping sigmoid sum a0 + sum_k a_k sigmoid(rho (u - b_k)).

    Coefficients telescope against the target: a0 = g(b_1), a_1 = 0 and
    a_k = g(b_k) - g(b_{k-1}) for k >= 2, so that
    a0 + sum_{k <= j} a_k = g(b_j) for every j.
    """

    a0: float
    coefficients: np.ndarray
    breakpoints: np.ndarray
    rho: float

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64).ravel()
        self.breakpoints = np.asarray(self.breakpoints, dtype=np.float64).ravel()
        if self.coefficients.shape != self.breakpoints.shape:
            raise ValueError("one coefficient per breakpoint required")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise ValueError("breakpoints must be strictly increasing")

    def value(self, u):
        """Sigmoid-sum value at u (scalar or array)."""
        u = np.asarray(u, dtype=np.float64)
        scalar = u.ndim == 0
        ub = np.atleast_1d(u)
        acts = sigmoid(self.rho * (ub[:, None] - self.breakpoints[None, :]))
        out = self.a0 + acts @ self.coefficients
        return float(out[0]) if scalar else out

    def step_value(self, u):
        """Pure step-function value (indicator limit of infinite steepness)."""
        u = np.asarray(u, dtype=np.float64)
        scalar = u.ndim == 0
        ub = np.atleast_1d(u)
        cum = self.a0 + np.concatenate([[0.0], np.cumsum(self.coefficients)])
        idx = np.searchsorted(self.breakpoints, ub, side="right")
        out = cum[idx]
        return float(out[0]) if scalar else out


def build_step_approximant(target: RidgeTarget, breakpoints, rho: float) -> StepApproximant:
    """Telescoping coefficients of g on the given breakpoint grid.

    The increment attached to the first breakpoint is zero: the sum starts
    at level g(b_1) and the k-th step raises it from g(b_{k-1}) to g(b_k).
    """
    bks = np.asarray(breakpoints, dtype=np.float64).ravel()
    if np.any(np.diff(bks) <= 0):
        raise ValueError("breakpoints must be strictly increasing")
    g_vals = np.asarray([float(target.g(b)) for b in bks])
    coeffs = np.concatenate([[0.0], np.diff(g_vals)])
    return StepApproximant(float(g_vals[0]), coeffs, bks, float(rho))


def approx_error_bound(
    p: float, C: float, K: int, a_bound: float, d: int, rho: float, n: int
) -> float:
    """Worst-case sup error of the sigmoid step approximant.

    3 C (4 A sqrt(d))^p / (K-1)^p
    + C (4 A sqrt(d))^p (K-1)^(1-p) exp(-rho sqrt(d) A / ((n+1)(K-1))).
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    s = math.sqrt(d) * a_bound
    base = C * (4.0 * s) ** p
    tail = np.exp(-rho * s / ((n + 1) * (K - 1)))
    return 3.0 * base / (K - 1) ** p + base * (K - 1) ** (1.0 - p) * float(tail)


def sup_gap(approx: StepApproximant, g: Callable, lo: float, hi: float,
            points: int = 100_000, chunk: int = 20_000) -> float:
    """Sup of |approx.value(u) - g(u)| over an equispaced grid on [lo, hi].

    The grid is deterministic (linspace), so repeated sweeps are
    reproducible; evaluation is chunked to bound memory.
    """
    grid = np.linspace(lo, hi, points)
    worst = 0.0
    for start in range(0, points, chunk):
        block = grid[start : start + chunk]
        err = np.abs(approx.value(block) - np.asarray(g(block), dtype=np.float64))
        worst = max(worst, float(err.max()))
    return worst
