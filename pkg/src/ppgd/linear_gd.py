"""Penalized linear least squares trained by gradient descent.

This module is the quantitative oracle for the optimization behaviour of
the network trainer: on the objective

    F(a) = (1/n) ||B a - y||^2 + (c1/n) ||a||^2

the gradient is globally Lipschitz with an explicit constant, the objective
satisfies a gradient-dominance (Polyak-Lojasiewicz) inequality with
constant 4 c1 / n, and the minimizer has a closed form.  Running gradient
descent with step 1/L therefore must show per-step descent of at least
||grad||^2 / (2 L) and geometric decay of the optimality gap with factor
(1 - (4 c1/n) / (2 L)).  :func:`run_linear_gd` checks both inequalities on
the computed trajectory and raises :class:`CertificationError` if either
fails beyond rounding slack, which would signal an implementation bug.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

__all__ = [
    "LinearProblem",
    "GDCertificate",
    "CertificationError",
    "linear_risk",
    "linear_gradient",
    "closed_form_optimum",
    "smoothness_constant",
    "pl_constant",
    "linear_gd_path",
    "run_linear_gd",
]

# Relative slack applied to the certified inequalities; they are exact in
# real arithmetic, so the slack only has to absorb rounding.
REL_SLACK = 1e-9
ABS_FLOOR = 1e-12


class CertificationError(RuntimeError):
    """A certified inequality failed beyond rounding slack."""


@dataclass
class LinearProblem:
    """Design matrix, targets and the (positive) penalty constant."""

    design: np.ndarray
    targets: np.ndarray
    penalty: float

    def __post_init__(self):
        self.design = np.atleast_2d(np.asarray(self.design, dtype=np.float64))
        self.targets = np.asarray(self.targets, dtype=np.float64).ravel()
        self.penalty = float(self.penalty)
        if self.design.shape[0] != self.targets.shape[0]:
            raise ValueError("design and targets disagree on the number of rows")
        if self.penalty <= 0:
            raise ValueError("penalty must be positive")
        if not (np.all(np.isfinite(self.design)) and np.all(np.isfinite(self.targets))):
            raise ValueError("problem data must be finite")

    @property
    def n(self) -> int:
        return self.design.shape[0]

    @property
    def k(self) -> int:
        return self.design.shape[1]


def linear_risk(a, prob: LinearProblem) -> float:
    """(1/n) ||B a - y||^2 + (c1/n) ||a||^2."""
    a = np.asarray(a, dtype=np.float64)
    resid = prob.design @ a - prob.targets
    return (float(resid @ resid) + prob.penalty * float(a @ a)) / prob.n


def linear_gradient(a, prob: LinearProblem) -> np.ndarray:
    """(2/n) (B^T B a - B^T y) + (2 c1/n) a."""
    a = np.asarray(a, dtype=np.float64)
    B = prob.design
    return (2.0 / prob.n) * (B.T @ (B @ a) - B.T @ prob.targets) + (
        2.0 * prob.penalty / prob.n
    ) * a


def closed_form_optimum(prob: LinearProblem) -> np.ndarray:
    """Minimizer of the penalized risk via a symmetric positive-definite solve.

    Solves (B^T B / n + (c1/n) I) a = B^T y / n with a Cholesky
    factorization; the matrix is positive definite because c1 > 0.
    """
    B = prob.design
    n = prob.n
    A = B.T @ B / n + (prob.penalty / n) * np.eye(prob.k)
    rhs = B.T @ prob.targets / n
    return cho_solve(cho_factor(A, lower=True), rhs)


def smoothness_constant(prob: LinearProblem) -> float:
    """Lipschitz constant of the gradient: 2 sum_k mean(B_k^2) + 2 c1 / n."""
    col_means = np.mean(prob.design**2, axis=0)
    return 2.0 * float(col_means.sum()) + 2.0 * prob.penalty / prob.n


def pl_constant(prob: LinearProblem) -> float:
    """Gradient-dominance constant: ||grad F(a)||^2 >= (4 c1/n) (F(a) - F_opt)."""
    return 4.0 * prob.penalty / prob.n


def linear_gd_path(prob: LinearProblem, a0, steps: int, step_size: float) -> np.ndarray:
    """Iterates a^(t+1) = a^(t) - step * grad F(a^(t)); returns (steps+1, K)."""
    a = np.asarray(a0, dtype=np.float64).copy()
    path = np.empty((steps + 1, a.shape[0]))
    path[0] = a
    for t in range(steps):
        a = a - step_size * linear_gradient(a, prob)
        path[t + 1] = a
    return path


@dataclass
class GDCertificate:
    """Constants and trajectory evidence from a certified descent run.

    ``trajectory_gaps[t]`` is F(a^(t)) - F(a_opt).  The two ``max_*``
    fields are the largest observed violations of the per-step descent
    inequality and of the geometric-contraction inequality; a correct run
    keeps both at or below zero up to rounding.
    """

    smoothness: float
    pl_constant: float
    contraction: float
    trajectory_gaps: np.ndarray
    max_descent_violation: float = 0.0
    max_contraction_violation: float = 0.0
    optimum_risk: float = field(default=float("nan"))


def run_linear_gd(prob: LinearProblem, a0, steps: int) -> GDCertificate:
    """Gradient descent with step 1/L plus inequality certification.

    Checks, for every step t:

    * descent:      F(a^(t+1)) - F(a^(t)) <= -||grad F(a^(t))||^2 / (2 L)
    * contraction:  gap_{t+1} <= (1 - rho/(2 L)) gap_t

    and globally gap_t <= (1 - rho/(2 L))^t gap_0, each with relative slack
    ``REL_SLACK`` and absolute floor ``ABS_FLOOR``.  Raises
    :class:`CertificationError` on any violation.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    L = smoothness_constant(prob)
    rho = pl_constant(prob)
    contraction = 1.0 - rho / (2.0 * L)
    step = 1.0 / L
    a_opt = closed_form_optimum(prob)
    f_opt = linear_risk(a_opt, prob)

    a = np.asarray(a0, dtype=np.float64).copy()
    f_cur = linear_risk(a, prob)
    gaps = [f_cur - f_opt]
    max_descent = 0.0
    max_contract = 0.0
    for _ in range(steps):
        g = linear_gradient(a, prob)
        a = a - step * g
        f_next = linear_risk(a, prob)
        descent_bound = -float(g @ g) / (2.0 * L) + REL_SLACK * (1.0 + abs(f_cur))
        max_descent = max(max_descent, (f_next - f_cur) - descent_bound)
        gap_prev = gaps[-1]
        gap = f_next - f_opt
        contract_bound = contraction * gap_prev + REL_SLACK * (1.0 + abs(gap_prev)) + ABS_FLOOR
        max_contract = max(max_contract, gap - contract_bound)
        gaps.append(gap)
        f_cur = f_next
    gaps = np.asarray(gaps)

    cert = GDCertificate(
        smoothness=L,
        pl_constant=rho,
        contraction=contraction,
        trajectory_gaps=gaps,
        max_descent_violation=max_descent,
        max_contraction_violation=max_contract,
        optimum_risk=f_opt,
    )
    if max_descent > 0:
        raise CertificationError(
            f"per-step descent inequality violated by {max_descent:.3e}"
        )
    if max_contract > 0:
        raise CertificationError(
            f"geometric contraction inequality violated by {max_contract:.3e}"
        )
    geometric = gaps[0] * contraction ** np.arange(len(gaps))
    if np.any(gaps > geometric * (1.0 + REL_SLACK) + ABS_FLOOR):
        raise CertificationError("global geometric decay of the optimality gap violated")
    return cert
