"""Scikit-learn style estimator interfaces.

These wrappers adapt the functional training API to the fit/predict
convention so the estimators compose with pipelines, grid search and
cross-validation utilities.  Hyperparameters live on the constructor
(``get_params``/``set_params`` come from ``BaseEstimator``); everything
derived from the data carries a trailing underscore.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .baselines import DEFAULT_K_GRID, KnnModel, constant_average, knn_predict, select_k
from .datasets import DataSet
from .rng import make_rng
from .training import fit as fit_network
from .training import make_config, predict as predict_network, select_hyperparams

__all__ = ["PPNetRegressor", "KnnRegressor", "ConstantRegressor", "check_X_y", "check_X"]


def check_X(X) -> np.ndarray:
    """Validate a design matrix: 2-D, finite, float64."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError("X must be a nonempty 2-D array")
    if not np.all(np.isfinite(X)):
        raise ValueError("X contains non-finite values")
    return X


def check_X_y(X, y) -> tuple[np.ndarray, np.ndarray]:
    """Validate a design matrix with matching finite response vector."""
    X = check_X(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")
    return X, y


class PPNetRegressor(BaseEstimator, RegressorMixin):
    """One-hidden-layer logistic network fitted by restarted gradient descent.

    With ``r`` and ``K`` given the network is trained directly; otherwise
    both are chosen by an 80/20 split over ``r_grid`` x ``K_grid`` and the
    winning already-trained network is kept.

    Parameters
    ----------
    r, K : int or None
        Ridge-term count and breakpoints per term.  ``None`` selects from
        the grids.
    c1 : float
        Outer-weight penalty constant of the training objective.
    c3 : float
        Prediction clamp scale; predictions are clipped to
        ``[-c3 log n, c3 log n]``.
    restarts : int
        Number of random initializations per fitted network.
    steps, steps_cap : int or None
        Exact step count override, or a cap on the schedule's
        ``ceil(K n (log n)^2)``.
    seed : int
        Root seed for all internal randomness.
    """

    def __init__(
        self,
        r=None,
        K=None,
        r_grid=(1, 2),
        K_grid=(5, 10, 20),
        c1=1.0,
        c3=1.0,
        restarts=50,
        steps=None,
        steps_cap=None,
        seed=0,
    ):
        self.r = r
        self.K = K
        self.r_grid = r_grid
        self.K_grid = K_grid
        self.c1 = c1
        self.c3 = c3
        self.restarts = restarts
        self.steps = steps
        self.steps_cap = steps_cap
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        data = DataSet(X, y, a_bound=max(1.0, float(np.abs(X).max())))
        if (self.r is None) != (self.K is None):
            raise ValueError("set both r and K or neither")
        if self.r is not None:
            config = make_config(
                data.n,
                self.r,
                self.K,
                c1=self.c1,
                c3=self.c3,
                restarts=self.restarts,
                steps=self.steps,
                steps_cap=self.steps_cap,
                seed=self.seed,
            )
            self.model_ = fit_network(data, config)
        else:
            sel = select_hyperparams(
                data,
                self.r_grid,
                self.K_grid,
                c1=self.c1,
                c3=self.c3,
                restarts=self.restarts,
                steps_cap=self.steps_cap,
                seed=self.seed,
            )
            self.model_ = sel.model
            self.selected_config_ = sel.config
            self.selection_cells_ = sel.cells
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "model_"):
            raise NotFittedError("call fit before predict")
        X = check_X(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        return predict_network(self.model_, X)


class KnnRegressor(BaseEstimator, RegressorMixin):
    """Brute-force k-nearest-neighbour mean with optional split-based k."""

    def __init__(self, k=None, k_grid=DEFAULT_K_GRID, seed=0):
        self.k = k
        self.k_grid = k_grid
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        data = DataSet(X, y, a_bound=max(1.0, float(np.abs(X).max())))
        if self.k is not None:
            self.model_ = KnnModel(data, self.k)
        else:
            self.model_ = select_k(data, self.k_grid, make_rng(self.seed))
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "model_"):
            raise NotFittedError("call fit before predict")
        return knn_predict(self.model_, check_X(X))


class ConstantRegressor(BaseEstimator, RegressorMixin):
    """The least squares constant: predicts the training mean everywhere."""

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.mean_ = constant_average(DataSet(X, y, max(1.0, float(np.abs(X).max()))))
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "mean_"):
            raise NotFittedError("call fit before predict")
        return np.full(check_X(X).shape[0], self.mean_)
