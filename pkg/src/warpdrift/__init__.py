"""Warped kernel estimation of the drift of a diffusion from i.i.d. paths,
with bandwidth selection by penalized comparison to overfitting (PCO)."""

from .errors import (
    DomainError,
    IncompatibleGridError,
    InvalidBandwidthError,
    InvalidConfigError,
    InvalidInputError,
    SimulationBlowupError,
    UnsupportedWarpError,
    WarpDriftError,
)
from .estimator import (
    DriftCurve,
    EstimatorConfig,
    WarpedSample,
    beta_hat,
    bias_target,
    drift_estimate,
    drift_estimate_known_warp,
    phi_representation,
    stochastic_sum,
    write_drift_curve,
)
from .experiments import (
    EvalGrid,
    ExperimentConfig,
    ExperimentReport,
    model1_table1,
    model2_table1,
    run_experiment,
    run_replication,
    write_report,
)
from .kernels import Kernel, bump_kernel, epanechnikov_kernel, get_kernel, scaled_deriv, scaled_eval
from .pco import (
    BandwidthGrid,
    PcoResult,
    WeightedNorm,
    oracle_select,
    pco_select,
    penalty,
    per_path_statistic_curve,
    weighted_inner,
)
from .sde import (
    DiffusionModel,
    Ensemble,
    Path,
    euler_maruyama,
    get_model,
    model_langevin,
    model_nonlinear,
    read_ensemble,
    simulate_ensemble,
    simulate_path,
    split_seed,
    write_ensemble,
)
from .warp import AnalyticOuLaw, AnalyticOuWarp, EmpiricalWarp, analytic_ou_warp, empirical_cdf

__version__ = "0.1.0"
