"""Moderate-scale selection: group-SCAD and the iterative screening drivers."""

from .group_scad import (
    ScadConfig,
    ScadModel,
    fit_group_scad,
    group_norm_B,
    lambda_max,
    scad_penalty,
    scad_penalty_derivative,
)
from .inis import (
    InisConfig,
    InisResult,
    InisTrace,
    default_zeta,
    run_conditional_inis,
    run_greedy_inis,
    run_inis,
)

__all__ = [
    "InisConfig",
    "InisResult",
    "InisTrace",
    "ScadConfig",
    "ScadModel",
    "default_zeta",
    "fit_group_scad",
    "group_norm_B",
    "lambda_max",
    "run_conditional_inis",
    "run_greedy_inis",
    "run_inis",
    "scad_penalty",
    "scad_penalty_derivative",
]
