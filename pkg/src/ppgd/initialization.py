"""Structured initial weights for the network.

The starting point of every gradient descent run is built in three steps:

1. draw one random unit direction per ridge term (uniform on the cube,
   normalized to Euclidean norm 1);
2. per direction, place ``K`` breakpoints on ``[-sqrt(d) A, sqrt(d) A]`` so
   that every breakpoint keeps a guaranteed distance from every projected
   training point (this makes all initial pre-activations large once the
   weights are scaled);
3. set the inner weights of neuron (s, k) so that its pre-activation equals
   ``rho * (c_s . x - b_k)`` for all x, and set every outer weight to zero.

Breakpoint grid for direction c, writing s = sqrt(d) * A and given n
training projections p_i = c . x_i:

* b_1 = -s - 2 s / ((n+1)(K-1));
* for k = 2..K the interval [-s + (k-2) h, -s + (k-1) h] with
  h = 2 s / (K-1) is subdivided into n+1 equal subintervals and b_k is the
  midpoint of one subinterval whose closed span contains no projection
  (a projection exactly on a shared endpoint disqualifies both neighbours);
  when several qualify the lowest-indexed one is taken.

The construction guarantees, with w = s / ((n+1)(K-1)):

    b_1 <= -s,  b_K >= s - 4 s/(K-1),
    w <= b_{k+1} - b_k <= 4 s/(K-1),  min_{i,k} |p_i - b_k| >= w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import NetworkParams

__all__ = [
    "InitPlan",
    "sample_direction",
    "choose_breakpoints",
    "build_initial_params",
    "build_init_plan",
]


@dataclass
class InitPlan:
    """Directions, per-direction breakpoints and the inner-weight scale."""

    directions: np.ndarray  # (r, d), unit rows
    breakpoints: np.ndarray  # (r, K), strictly increasing rows
    rho: float

    def __post_init__(self):
        self.directions = np.atleast_2d(np.asarray(self.directions, dtype=np.float64))
        self.breakpoints = np.atleast_2d(np.asarray(self.breakpoints, dtype=np.float64))
        if self.directions.shape[0] != self.breakpoints.shape[0]:
            raise ValueError("one breakpoint row per direction required")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        norms = np.linalg.norm(self.directions, axis=1)
        if np.abs(norms - 1.0).max() > 1e-12:
            raise ValueError("directions must have unit Euclidean norm")
        if np.any(np.diff(self.breakpoints, axis=1) <= 0):
            raise ValueError("breakpoints must be strictly increasing")


def sample_direction(d: int, rng: np.random.Generator) -> np.ndarray:
    """Random unit vector: uniform draw on [-1,1]^d, normalized.

    Draws with norm below 1e-9 are rejected so the normalization is well
    conditioned.  For d = 1 the result is -1 or +1.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    while True:
        v = rng.uniform(-1.0, 1.0, d)
        norm = float(np.linalg.norm(v))
        if norm >= 1e-9:
            return v / norm


def choose_breakpoints(projections, K: int, n: int, a_bound: float, d: int) -> np.ndarray:
    """Data-avoiding breakpoint grid for one direction.

    ``projections`` are the n projected training points; they must satisfy
    ``|p| <= sqrt(d) * a_bound``.  Returns K strictly increasing breakpoints
    satisfying the guarantees in the module docstring.  Deterministic: no
    randomness enters the choice.
    """
    if K < 2:
        raise ValueError("K must be at least 2 (the grid divides by K - 1)")
    proj = np.asarray(projections, dtype=np.float64).ravel()
    if proj.shape[0] != n:
        raise ValueError(f"expected {n} projections, got {proj.shape[0]}")
    s = math.sqrt(d) * a_bound
    if proj.size and np.abs(proj).max() > s:
        raise ValueError("projection outside [-sqrt(d) A, sqrt(d) A]")
    thresh = s / ((n + 1) * (K - 1))  # = half subinterval width
    width = 2.0 * s / ((K - 1) * (n + 1))
    h = 2.0 * s / (K - 1)
    out = np.empty(K)
    out[0] = -s - 2.0 * s / ((n + 1) * (K - 1))
    offsets = (np.arange(n + 1) + 0.5) * width
    for k in range(2, K + 1):
        left = -s + (k - 2) * h
        mids = left + offsets
        if proj.size:
            dist = np.abs(proj[None, :] - mids[:, None]).min(axis=1)
            ok = np.nonzero(dist > thresh)[0]
            if ok.size == 0:
                # Only reachable when projections sit exactly on shared
                # subinterval endpoints (each such point disqualifies both
                # neighbours).  Fall back to half-open occupancy, where n
                # points cannot fill n + 1 bins.
                bounds = left + np.arange(n + 2) * width
                inside = proj[(proj >= bounds[0]) & (proj < bounds[-1])]
                counts = np.bincount(
                    np.clip(np.searchsorted(bounds, inside, side="right") - 1, 0, n),
                    minlength=n + 1,
                )
                ok = np.nonzero(counts == 0)[0]
                if ok.size == 0:
                    raise RuntimeError("no admissible subinterval; cannot happen")
            idx = int(ok[0])
        else:
            idx = 0
        out[k - 1] = mids[idx]
    return out


def build_init_plan(data, r: int, K: int, rho: float, rng: np.random.Generator) -> InitPlan:
    """Sample r directions and build their breakpoint grids for ``data``."""
    dirs = np.empty((r, data.dim))
    bks = np.empty((r, K))
    for s_idx in range(r):
        c = sample_direction(data.dim, rng)
        dirs[s_idx] = c
        bks[s_idx] = choose_breakpoints(data.xs @ c, K, data.n, data.a_bound, data.dim)
    return InitPlan(dirs, bks, rho)


def build_initial_params(plan: InitPlan, r: int, K: int, d: int) -> NetworkParams:
    """Materialize the plan as network weights.

    Neuron (s, k) gets inner weights ``rho * c_s`` and bias ``-rho * b_{s,k}``
    so its pre-activation at x is ``rho * (c_s . x - b_{s,k})``; all outer
    weights start at zero, making the initial network identically zero.
    """
    if plan.directions.shape != (r, d) or plan.breakpoints.shape != (r, K):
        raise ValueError("plan shape does not match (r, K, d)")
    inner = np.empty((r * K, d + 1))
    for s_idx in range(r):
        rows = slice(s_idx * K, (s_idx + 1) * K)
        inner[rows, 1:] = plan.rho * plan.directions[s_idx]
        inner[rows, 0] = -plan.rho * plan.breakpoints[s_idx]
    return NetworkParams(np.zeros(r * K + 1), inner)
