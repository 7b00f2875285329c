"""EM-based maximum-likelihood estimation for alpha-stable distributions.

The package provides the stable-law primitives (parameterizations,
characteristic functions, samplers, Monte Carlo density), the four-phase
EM/ECM/SEM estimator built on the scale-location normal mixture
representation, quantile and characteristic-function baseline estimators,
and a replicated RMSE study harness.
"""

__version__ = "0.1.0"

from .baselines import QuantileTableSet, cf_estimate, load_default_tables, sq_estimate
from .dataio import PriceSeries, ReturnSeries, load_price_csv, to_returns
from .density import DENSITY_FLOOR, ks_statistic, observed_loglik, pdf_mc
from .em import (
    DegenerateWeightsError,
    EMAbortError,
    EMConfig,
    EMTrace,
    ExpectationTriple,
    FitResult,
    cm_step_alpha,
    e_step_expectations,
    fit_em,
    maximize_lw,
    sample_w_posterior,
    transform_cm,
    update_beta_profile,
    update_mu0,
    update_sigma,
)
from .params import (
    MixtureCoefficients,
    Parameterization,
    StableParams,
    characteristic_function,
    convert_parameterization,
    mixture_coefficients,
)
from .rng import RngStream
from .sampling import sample_representation, sample_stable
from .study import StudyCell, StudyGrid, desk_grid, paper_grid, rmse, run_rmse_study

__all__ = [
    "__version__",
    "Parameterization",
    "StableParams",
    "MixtureCoefficients",
    "RngStream",
    "convert_parameterization",
    "characteristic_function",
    "mixture_coefficients",
    "sample_stable",
    "sample_representation",
    "pdf_mc",
    "observed_loglik",
    "ks_statistic",
    "DENSITY_FLOOR",
    "EMConfig",
    "ExpectationTriple",
    "EMTrace",
    "FitResult",
    "DegenerateWeightsError",
    "EMAbortError",
    "e_step_expectations",
    "update_mu0",
    "update_sigma",
    "update_beta_profile",
    "transform_cm",
    "sample_w_posterior",
    "maximize_lw",
    "cm_step_alpha",
    "fit_em",
    "sq_estimate",
    "cf_estimate",
    "QuantileTableSet",
    "load_default_tables",
    "StudyGrid",
    "StudyCell",
    "rmse",
    "run_rmse_study",
    "desk_grid",
    "paper_grid",
    "PriceSeries",
    "ReturnSeries",
    "to_returns",
    "load_price_csv",
]
