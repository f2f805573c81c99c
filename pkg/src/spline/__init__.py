"""B-spline basis construction for varying-coefficient fits."""

from .basis import (
    DEFAULT_DEGREE,
    DEFAULT_NUM_BASIS,
    MarginalDesign,
    SplineBasis,
    build_basis,
    eval_basis,
    marginal_design,
)

__all__ = [
    "DEFAULT_DEGREE",
    "DEFAULT_NUM_BASIS",
    "MarginalDesign",
    "SplineBasis",
    "build_basis",
    "eval_basis",
    "marginal_design",
]
