"""Monte Carlo comparison of the estimators on the synthetic targets.

For each repetition a fresh training sample is drawn and every estimator in
the roster is fitted; its empirical L2 error against the noise-free target
on a fixed test design is divided by a reference error (the median test
error of the constant-average estimator over 50 independent samples), and
the per-estimator medians and interquartile ranges over all repetitions are
tabulated.

All randomness is derived from ``base_seed`` through fixed integer tags, so
a run is a pure function of its spec: repetitions can execute in any order
or in parallel without changing a single output byte.  The test design is
drawn once per spec and shared by all repetitions and estimators.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .baselines import DEFAULT_K_GRID, constant_average, knn_predict, select_k
from .datasets import SyntheticSpec, eval_target, generate_sample
from .rng import derive_seed, make_rng
from .training import predict, select_hyperparams

__all__ = [
    "ExperimentSpec",
    "ResultRow",
    "ResultTable",
    "empirical_l2",
    "avg_reference",
    "run_experiment",
    "median_iqr",
]

_TAG_TEST = 11
_TAG_AVG = 12
_TAG_SAMPLE = 13
_TAG_NEURAL = 14
_TAG_SPLIT_NEURAL = 15
_TAG_SPLIT_KNN = 16

CSV_COLUMNS = (
    "model,noise,n,estimator,median_scaled_error,iqr,repetitions,avg_reference"
)


@dataclass
class ExperimentSpec:
    """One cell of the simulation study plus execution knobs."""

    model_id: str
    noise: float
    n: int
    repetitions: int
    test_size: int = 10_000
    estimators: tuple = ("neural", "neighbor", "average")
    r_grid: tuple = (1, 2)
    K_grid: tuple = (5, 10, 20)
    k_grid: tuple = DEFAULT_K_GRID
    restarts: int = 50
    steps_cap: int | None = None
    c1: float = 1.0
    c3: float = 1.0
    base_seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.repetitions < 1 or self.test_size < 1:
            raise ValueError("repetitions and test_size must be positive")
        known = {"neural", "neighbor", "average"}
        bad = set(self.estimators) - known
        if bad:
            raise ValueError(f"unknown estimators: {sorted(bad)}")

    def synthetic(self) -> SyntheticSpec:
        return SyntheticSpec(self.model_id, self.noise)


@dataclass
class ResultRow:
    model: str
    noise: float
    n: int
    estimator: str
    median_scaled_error: float
    iqr: float
    repetitions: int
    avg_reference: float
    failures: int = 0


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)
    scaled_errors: dict = field(default_factory=dict)  # estimator -> list per rep

    def to_csv(self) -> str:
        lines = [CSV_COLUMNS]
        for row in self.rows:
            lines.append(
                f"{row.model},{row.noise!r},{row.n},{row.estimator},"
                f"{row.median_scaled_error!r},{row.iqr!r},{row.repetitions},"
                f"{row.avg_reference!r}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        doc = {"rows": [asdict(r) for r in self.rows], "scaled_errors": self.scaled_errors}
        return json.dumps(doc, indent=2) + "\n"

    def row(self, estimator: str) -> ResultRow:
        for r in self.rows:
            if r.estimator == estimator:
                return r
        raise KeyError(estimator)


def empirical_l2(predict_fn, test_xs: np.ndarray, reference_fn) -> float:
    """Mean squared gap between an estimate and the reference on a test design."""
    test_xs = np.atleast_2d(np.asarray(test_xs, dtype=np.float64))
    if test_xs.shape[0] < 1:
        raise ValueError("test design must be nonempty")
    diff = np.asarray(predict_fn(test_xs), dtype=np.float64) - np.asarray(
        reference_fn(test_xs), dtype=np.float64
    )
    return float(diff @ diff) / test_xs.shape[0]


def median_iqr(values) -> tuple[float, float]:
    """Median and 75th-minus-25th percentile with linear interpolation."""
    q25, q50, q75 = np.percentile(np.asarray(values, dtype=np.float64), [25, 50, 75])
    return float(q50), float(q75 - q25)


def _test_design(spec: ExperimentSpec) -> np.ndarray:
    rng = make_rng(spec.base_seed, _TAG_TEST)
    return rng.random((spec.test_size, spec.synthetic().dimension)) * 2.0 - 1.0


def _avg_reference_from(sample_fn, test_xs, target_fn, realizations: int = 50) -> float:
    """Median test error of the constant-average estimator over fresh samples."""
    targets = np.asarray(target_fn(test_xs), dtype=np.float64)
    errs = []
    for j in range(realizations):
        data = sample_fn(j)
        c = constant_average(data)
        diff = c - targets
        errs.append(float(diff @ diff) / len(targets))
    return float(np.median(errs))


def avg_reference(spec: ExperimentSpec) -> float:
    """Error scale: median constant-average test error over 50 fresh samples."""
    synth = spec.synthetic()
    test_xs = _test_design(spec)
    return _avg_reference_from(
        lambda j: generate_sample(synth, spec.n, derive_seed(spec.base_seed, _TAG_AVG, j)),
        test_xs,
        lambda xs: eval_target(synth, xs),
    )


def _run_repetition(spec: ExperimentSpec, rep: int, test_xs, targets):
    """Scaled-error ingredients for one repetition; pure function of (spec, rep)."""
    synth = spec.synthetic()
    data = generate_sample(synth, spec.n, derive_seed(spec.base_seed, _TAG_SAMPLE, rep))
    out = {}
    for name in spec.estimators:
        try:
            if name == "neural":
                sel = select_hyperparams(
                    data,
                    spec.r_grid,
                    spec.K_grid,
                    make_rng(spec.base_seed, _TAG_SPLIT_NEURAL, rep),
                    c1=spec.c1,
                    c3=spec.c3,
                    restarts=spec.restarts,
                    steps_cap=spec.steps_cap,
                    seed=derive_seed(spec.base_seed, _TAG_NEURAL, rep),
                )
                preds = predict(sel.model, test_xs)
            elif name == "neighbor":
                model = select_k(
                    data, spec.k_grid, make_rng(spec.base_seed, _TAG_SPLIT_KNN, rep)
                )
                preds = knn_predict(model, test_xs)
            else:
                preds = np.full(len(targets), constant_average(data))
            diff = preds - targets
            out[name] = float(diff @ diff) / len(targets)
        except Exception as exc:  # noqa: BLE001 - a failed fit must not kill the run
            out[name] = ("failed", repr(exc))
    return out


def run_experiment(spec: ExperimentSpec) -> ResultTable:
    """Run the full study for one (model, noise, n) cell.

    Failed estimator fits are recorded and excluded from the aggregation;
    the run continues.  Output is deterministic given the spec, including
    ``threads``.
    """
    test_xs = _test_design(spec)
    synth = spec.synthetic()
    targets = eval_target(synth, test_xs)
    avg_ref = avg_reference(spec)

    jobs = (
        Parallel(n_jobs=spec.threads)(
            delayed(_run_repetition)(spec, rep, test_xs, targets)
            for rep in range(spec.repetitions)
        )
        if spec.threads != 1
        else [
            _run_repetition(spec, rep, test_xs, targets)
            for rep in range(spec.repetitions)
        ]
    )

    table = ResultTable()
    for name in spec.estimators:
        values, failures = [], 0
        for rep_out in jobs:
            v = rep_out[name]
            if isinstance(v, tuple):
                failures += 1
            else:
                values.append(v / avg_ref)
        if values:
            med, iqr = median_iqr(values)
        else:
            med, iqr = float("nan"), float("nan")
        table.rows.append(
            ResultRow(
                model=spec.model_id,
                noise=spec.noise,
                n=spec.n,
                estimator=name,
                median_scaled_error=med,
                iqr=iqr,
                repetitions=len(values),
                avg_reference=avg_ref,
                failures=failures,
            )
        )
        table.scaled_errors[name] = values
    return table
