"""Simulation, estimation and numerical verification for regressions with decreasing-gain learning."""

from .asymptotics import (
    B_factor,
    D1_limit,
    D_limit,
    K_and_V2,
    LimitValues,
    V0_matrix,
    d_func,
    kappa_theta_var,
    lambda_cov,
    limit_values,
    sigma_a_adot,
    sigma_a_sq,
    sigma_adot_sq,
)
from .errors import (
    AssumptionError,
    CollinearityError,
    DegenerateRegressorError,
    DomainError,
    EstimationError,
    GainLearnError,
    IdentificationError,
    ParameterError,
)
from .estimators import (
    EstimateSet,
    KappaFit,
    LambdaFit,
    ThetaFit,
    alpha_hat,
    estimate_all,
    joint_kappa,
    nls_theta,
    ols_lambda,
    two_step,
)
from .harness import ExperimentConfig, McReport, emit_csv, load_config, print_limits, read_csv, run_experiment
from .model import (
    ModelParams,
    NoiseSource,
    SimPath,
    filter_candidate,
    filter_dagger,
    filter_derivatives,
    simulate_path,
)
from .special import digamma, polygamma
from .weights import f_surrogate, g_derivative, g_weight, g_weights, phi

__version__ = "0.1.0"
