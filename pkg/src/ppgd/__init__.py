"""Projection pursuit regression with gradient-descent-trained networks.

The estimator fits a one-hidden-layer logistic network whose structured
random initialization makes the hidden layer behave like a family of step
functions of random linear projections; full-batch gradient descent then
optimizes a penalized empirical L2 risk, the best of many restarts is kept
and predictions are clamped.  The package also ships the nearest-neighbour
and constant baselines, a Monte Carlo comparison harness and numerical
certification suites for the quantitative guarantees the training scheme
relies on.
"""

from .approx import (
    RidgeTarget,
    StepApproximant,
    approx_error_bound,
    build_step_approximant,
    indicator_gap,
    sigmoid_indicator_gap,
    sup_gap,
)
from .baselines import KnnModel, constant_average, knn_predict, select_k
from .datasets import (
    DataSet,
    ParseError,
    SyntheticSpec,
    eval_target,
    generate_sample,
    load_csv,
    save_csv,
)
from .estimators import ConstantRegressor, KnnRegressor, PPNetRegressor
from .experiment import (
    ExperimentSpec,
    ResultTable,
    avg_reference,
    empirical_l2,
    median_iqr,
    run_experiment,
)
from .initialization import (
    InitPlan,
    build_initial_params,
    build_init_plan,
    choose_breakpoints,
    sample_direction,
)
from .linear_gd import (
    CertificationError,
    GDCertificate,
    LinearProblem,
    closed_form_optimum,
    linear_gd_path,
    linear_gradient,
    linear_risk,
    pl_constant,
    run_linear_gd,
    smoothness_constant,
)
from .network import (
    NetworkParams,
    RiskBreakdown,
    forward,
    gradient,
    penalized_risk,
    sigmoid,
    sigmoid_prime,
    truncate,
)
from .training import (
    CandidateModel,
    SelectionResult,
    TrainConfig,
    TrainedModel,
    TrainingError,
    TrainTrace,
    activation_margin,
    drift_bound,
    fit,
    gd_step,
    make_config,
    model_from_dict,
    model_to_dict,
    predict,
    select_hyperparams,
    theorem_restarts,
    theorem_schedule,
    train_once,
)

__version__ = "0.1.0"
