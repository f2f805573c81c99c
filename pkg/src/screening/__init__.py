"""Marginal nonparametric screening and permutation thresholds."""

from .dataset import Dataset, load_dataset_csv
from .joint_fit import JointFit, fit_joint_unpenalized
from .marginal import (
    MarginalFit,
    ScreenConfig,
    ScreenReport,
    fit_intercept_only,
    fit_marginal,
    minimum_model_size,
    screen_all,
    select_by_threshold,
    sis_scores,
)
from .permutation import (
    PermutationConfig,
    conditional_permutation_threshold,
    permutation_threshold,
)

__all__ = [
    "Dataset",
    "JointFit",
    "MarginalFit",
    "PermutationConfig",
    "ScreenConfig",
    "ScreenReport",
    "conditional_permutation_threshold",
    "fit_intercept_only",
    "fit_joint_unpenalized",
    "fit_marginal",
    "load_dataset_csv",
    "minimum_model_size",
    "permutation_threshold",
    "screen_all",
    "select_by_threshold",
    "sis_scores",
]
