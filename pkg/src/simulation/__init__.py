"""Simulation designs, the housing benchmark and evaluation metrics."""

from .generators import EXAMPLES, SimSpec, SimulatedData, generate, signal_to_noise, true_support
from .housing import HOUSING_COLUMNS, augment_housing, load_housing_csv
from .metrics import EvalMetrics, metrics, robust_sd, summarize
from .replicates import (
    StudyConfig,
    replicate_seed,
    run_housing_benchmark,
    run_inis_replicates,
    run_mms_comparison,
    run_permutation_study,
    summarize_rows,
)

__all__ = [
    "EXAMPLES",
    "EvalMetrics",
    "HOUSING_COLUMNS",
    "SimSpec",
    "SimulatedData",
    "StudyConfig",
    "augment_housing",
    "generate",
    "load_housing_csv",
    "metrics",
    "replicate_seed",
    "robust_sd",
    "run_housing_benchmark",
    "run_inis_replicates",
    "run_mms_comparison",
    "run_permutation_study",
    "signal_to_noise",
    "summarize",
    "summarize_rows",
    "true_support",
]
