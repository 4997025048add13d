"""Two-stage variable selection for linear models.

Stage one narrows the problem with an L1 path and an information criterion;
stage two keeps the variables whose confidence intervals clear a data-driven
null region, then refits the survivors by least squares.  The package also
ships the comparison baselines, a synthetic support-recovery benchmark, and a
CLI (``sgpv-select``).
"""

from .baselines import BaselineFit, adaptive_lasso_fit, lasso_gic_fit, oracle_ols
from .errors import (
    CandidateTooLarge,
    ConstantColumn,
    DegenerateGic,
    EmptyCandidateSet,
    NoConvergenceWarning,
    NonNumericColumn,
    OutcomeMissing,
    RankDeficient,
    SelectionError,
    TooFewRows,
    Underdetermined,
    ZeroLengthInterval,
)
from .lasso import GicSelection, LassoPath, cd_solve, gic_select, lambda_grid
from .linalg import Dataset, OlsFit, StandardizedDataset, ols_fit, standardize
from .select import SelectConfig, SelectionResult, fit_one_stage, fit_two_stage
from .sgpv import Interval, SgpvReport, null_bound, screen, sgpv_value
from .simbench import (
    MetricsRecord,
    ScenarioSpec,
    TrueModel,
    eval_metrics,
    gen_design,
    gen_response,
    make_beta,
    population_pve,
    run_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineFit",
    "CandidateTooLarge",
    "ConstantColumn",
    "Dataset",
    "DegenerateGic",
    "EmptyCandidateSet",
    "GicSelection",
    "Interval",
    "LassoPath",
    "MetricsRecord",
    "NoConvergenceWarning",
    "NonNumericColumn",
    "OlsFit",
    "OutcomeMissing",
    "RankDeficient",
    "ScenarioSpec",
    "SelectConfig",
    "SelectionError",
    "SelectionResult",
    "SgpvReport",
    "StandardizedDataset",
    "TooFewRows",
    "TrueModel",
    "Underdetermined",
    "ZeroLengthInterval",
    "adaptive_lasso_fit",
    "cd_solve",
    "eval_metrics",
    "fit_one_stage",
    "fit_two_stage",
    "gen_design",
    "gen_response",
    "gic_select",
    "lambda_grid",
    "lasso_gic_fit",
    "make_beta",
    "null_bound",
    "ols_fit",
    "oracle_ols",
    "population_pve",
    "run_experiment",
    "screen",
    "sgpv_value",
    "standardize",
]
