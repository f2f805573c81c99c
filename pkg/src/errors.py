"""Exception types raised by the screening library."""

from typing import Any, Dict, List, Optional


class NisError(Exception):
    """Base class for all library errors."""

    exit_code = 5


class DegenerateExposure(NisError):
    """All exposure values are equal, so no spline support can be built."""

    exit_code = 4


class InvalidBasisSize(NisError):
    """Requested number of basis functions is too small for the degree or sample."""

    exit_code = 4


class OutOfSupport(NisError):
    """Exposure value outside the basis support while clamping is disabled."""

    exit_code = 4


class LengthMismatch(NisError):
    """Vectors that must share a length do not."""

    exit_code = 3


class SingularDesign(NisError):
    """Marginal or intercept design is numerically rank deficient."""

    exit_code = 4

    def __init__(self, message: str, index: Optional[int] = None, condition: float = float("inf")):
        super().__init__(message)
        self.index = index
        self.condition = condition


class SingularJointDesign(NisError):
    """Joint spline design stays singular after the ridge fallback."""

    exit_code = 4


class InsufficientCandidates(NisError):
    """Fewer candidate covariates than the permutation rank q."""

    exit_code = 4


class ConditioningFitFailed(NisError):
    """The joint fit on the conditioning set failed."""

    exit_code = 4


class AllLambdaFailed(NisError):
    """Every value of the tuning grid diverged."""

    exit_code = 4

    def __init__(self, message: str, diagnostics: Optional[List[Dict[str, Any]]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class UnknownIndex(NisError):
    """Covariate index outside 0..p-1."""

    exit_code = 3


class InvalidSpec(NisError):
    """Simulation specification with out-of-range parameters."""

    exit_code = 3


class TooFewValues(NisError):
    """Not enough values to compute a summary statistic."""

    exit_code = 4


class MissingColumns(NisError):
    """Input table lacks required columns."""

    exit_code = 3

    def __init__(self, message: str, columns: Optional[List[str]] = None):
        super().__init__(message)
        self.columns = columns or []


class SchemaError(NisError):
    """Input table failed schema validation."""

    exit_code = 3

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        super().__init__(message)
        self.row = row
        self.column = column


class InisFailed(NisError):
    """An iterative screening run aborted; the partial trace is attached."""

    exit_code = 4

    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace


class UsageError(NisError):
    """Option values rejected before any data is read."""

    exit_code = 2
