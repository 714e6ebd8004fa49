"""Comparison estimators: k-nearest-neighbour mean and the constant average."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .training import split_indices

__all__ = ["KnnModel", "knn_predict", "select_k", "constant_average", "DEFAULT_K_GRID"]

DEFAULT_K_GRID = (1, 2, 4, 8, 16, 32)


@dataclass
class KnnModel:
    """A training set together with the neighbour count k."""

    data: object  # DataSet
    k: int

    def __post_init__(self):
        if not 1 <= self.k <= self.data.n:
            raise ValueError("k must lie in [1, n]")


def knn_predict(model: KnnModel, x):
    """Mean response of the k nearest training points (Euclidean distance).

    Distance ties are broken by the lower training index.
    """
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 1
    pts = np.atleast_2d(x)
    xs, ys, k = model.data.xs, model.data.ys, model.k
    out = np.empty(pts.shape[0])
    for i, p in enumerate(pts):
        d2 = ((xs - p) ** 2).sum(axis=1)
        nearest = np.argsort(d2, kind="stable")[:k]
        out[i] = ys[nearest].mean()
    return float(out[0]) if scalar else out


def select_k(data, grid=DEFAULT_K_GRID, rng: np.random.Generator | None = None) -> KnnModel:
    """Pick k by an 80/20 split, then return a model over the full data.

    Grid values above the learning-split size are skipped.  Ties go to the
    smaller k.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    learn_idx, test_idx = split_indices(data.n, rng)
    learn = data.subset(learn_idx)
    best = None
    for k in sorted(int(k) for k in grid):
        if k > learn.n:
            continue
        preds = knn_predict(KnnModel(learn, k), data.xs[test_idx])
        risk = float(np.mean((preds - data.ys[test_idx]) ** 2))
        if best is None or risk < best[0]:
            best = (risk, k)
    if best is None:
        raise ValueError("no admissible k in the grid")
    return KnnModel(data, best[1])


def constant_average(data) -> float:
    """The least squares constant: the mean response."""
    return float(np.mean(data.ys))
