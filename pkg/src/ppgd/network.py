"""One-hidden-layer logistic network: value, penalized risk, exact gradient.

The network is

    f(x) = a_0 + sum_k a_k * sigmoid(b_{k,1} x_1 + ... + b_{k,d} x_d + b_{k,0})

with outer weights ``a_0..a_M`` and inner weights ``b_{k,j}``.  The training
objective is the penalized empirical L2 risk

    F(a, b) = (1/n) sum_i (f(x_i) - y_i)^2 + (c1/n) sum_{k=0}^{M} a_k^2,

note that the penalty includes the output bias ``a_0``.  Inner weights can
be as large as ~1e12 (the structured initialization scales them by n^2 * K),
so the sigmoid is evaluated with the sign-branched form that never
exponentiates a positive argument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NetworkParams",
    "RiskBreakdown",
    "sigmoid",
    "sigmoid_prime",
    "forward",
    "penalized_risk",
    "gradient",
    "truncate",
    "params_to_dict",
    "params_from_dict",
]


def sigmoid(z):
    """Numerically stable logistic function 1 / (1 + exp(-z)).

    For z >= 0 this evaluates 1 / (1 + e^-z); for z < 0 it evaluates
    e^z / (1 + e^z).  Both branches only exponentiate non-positive
    arguments, so no finite input can overflow.
    """
    z = np.asarray(z, dtype=np.float64)
    scalar = z.ndim == 0
    zb = np.atleast_1d(z)
    ez = np.exp(-np.abs(zb))
    denom = 1.0 + ez
    out = np.where(zb >= 0, 1.0 / denom, ez / denom)
    return float(out[0]) if scalar else out


def sigmoid_prime(z):
    """Derivative of the logistic function, computed as s * (1 - s)."""
    s = sigmoid(z)
    return s * (1.0 - s)


@dataclass
class NetworkParams:
    """Weights of the network (also used as the container for gradients).

    ``outer`` has length M + 1 with ``outer[0]`` the output bias;
    ``inner`` is (M, d + 1) with column 0 the per-neuron bias ``b_{k,0}``
    and columns 1..d the coefficients ``b_{k,j}``.
    """

    outer: np.ndarray
    inner: np.ndarray

    def __post_init__(self):
        self.outer = np.asarray(self.outer, dtype=np.float64).ravel()
        self.inner = np.atleast_2d(np.asarray(self.inner, dtype=np.float64))
        if self.outer.shape[0] != self.inner.shape[0] + 1:
            raise ValueError(
                f"outer has length {self.outer.shape[0]} but inner has "
                f"{self.inner.shape[0]} rows (expected outer = rows + 1)"
            )
        if not (np.all(np.isfinite(self.outer)) and np.all(np.isfinite(self.inner))):
            raise ValueError("network weights must be finite")

    @property
    def neurons(self) -> int:
        return self.inner.shape[0]

    @property
    def dim(self) -> int:
        return self.inner.shape[1] - 1

    def copy(self) -> "NetworkParams":
        return NetworkParams(self.outer.copy(), self.inner.copy())

    @classmethod
    def zeros(cls, neurons: int, dim: int) -> "NetworkParams":
        return cls(np.zeros(neurons + 1), np.zeros((neurons, dim + 1)))


def preactivations(params: NetworkParams, xs: np.ndarray) -> np.ndarray:
    """Per-neuron pre-activation values; xs is (n, d), result is (n, M)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    if xs.shape[1] != params.dim:
        raise ValueError(f"points have dimension {xs.shape[1]}, network expects {params.dim}")
    return xs @ params.inner[:, 1:].T + params.inner[:, 0]


def forward(params: NetworkParams, x):
    """Network value at ``x`` (single point of shape (d,) or batch (n, d))."""
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 1
    z = preactivations(params, x)
    out = sigmoid(z) @ params.outer[1:] + params.outer[0]
    return float(out[0]) if scalar else out


@dataclass
class RiskBreakdown:
    """Penalized empirical L2 risk split into its two summands.

    ``total`` is always the float sum ``empirical + penalty`` in this
    evaluation order, so the identity holds exactly.
    """

    empirical: float
    penalty: float

    @property
    def total(self) -> float:
        return self.empirical + self.penalty


def penalized_risk(params: NetworkParams, data, c1: float) -> RiskBreakdown:
    """Mean squared residual plus (c1/n) * sum of squared outer weights."""
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    n = data.n
    resid = forward(params, data.xs) - data.ys
    empirical = float(resid @ resid) / n
    penalty = (c1 / n) * float(params.outer @ params.outer)
    return RiskBreakdown(empirical, penalty)


def _outer_gradient(a, resid, St, n, c1, out=None):
    """Gradient with respect to the outer weights.

    ``a`` is the outer weight vector (length M + 1), ``resid`` the residuals
    f(x_i) - y_i, ``St`` the contiguous transpose of the (n, M) activation
    matrix.  This kernel backs both the public :func:`gradient` and the
    training loop, so the two agree bit for bit.
    """
    two_n = 2.0 / n
    shrink = 2.0 * c1 / n
    ga0 = two_n * float(resid.sum()) + shrink * a[0]
    ga = np.dot(St, resid, out=out)
    ga *= two_n
    ga += shrink * a[1:]
    return ga0, ga


def _inner_gradient(a, resid, D, X1, n, c1):
    """Gradient with respect to the inner weights (rows are neurons)."""
    W = resid[:, None] * D
    return (2.0 / n) * (a[1:, None] * (W.T @ X1))


def gradient(params: NetworkParams, data, c1: float) -> NetworkParams:
    """Exact gradient of the penalized risk, in a NetworkParams container.

    dF/da_0   = (2/n) sum_i r_i + (2 c1/n) a_0
    dF/da_k   = (2/n) sum_i r_i s_ik + (2 c1/n) a_k
    dF/db_kj  = (2/n) sum_i r_i a_k s_ik (1 - s_ik) x_i^(j),  x_i^(0) = 1

    with residuals r_i = f(x_i) - y_i and activations s_ik.
    """
    if c1 <= 0:
        raise ValueError("c1 must be positive")
    n = data.n
    Z = preactivations(params, data.xs)
    S = sigmoid(Z)
    St = np.ascontiguousarray(S.T)
    D = S * (1.0 - S)
    X1 = np.hstack([np.ones((n, 1)), data.xs])
    resid = S @ params.outer[1:] + params.outer[0]
    resid -= data.ys
    ga0, ga = _outer_gradient(params.outer, resid, St, n, c1)
    gB = _inner_gradient(params.outer, resid, D, X1, n, c1)
    return NetworkParams(np.concatenate([[ga0], ga]), gB)


def truncate(v, beta: float):
    """Clamp ``v`` to the interval [-beta, beta]."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    if np.isscalar(v) or np.asarray(v).ndim == 0:
        return float(min(max(float(v), -beta), beta))
    return np.clip(np.asarray(v, dtype=np.float64), -beta, beta)


def params_to_dict(params: NetworkParams) -> dict:
    return {
        "outer": [float(a) for a in params.outer],
        "inner": [[float(b) for b in row] for row in params.inner],
    }


def params_from_dict(doc: dict) -> NetworkParams:
    return NetworkParams(np.asarray(doc["outer"]), np.asarray(doc["inner"]))
