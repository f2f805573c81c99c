"""Normalized B-spline basis on the exposure support and marginal spline designs."""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.interpolate import BSpline

from ..errors import DegenerateExposure, InvalidBasisSize, LengthMismatch, OutOfSupport

logger = logging.getLogger(__name__)

DEFAULT_NUM_BASIS = 7
DEFAULT_DEGREE = 3


@dataclass(frozen=True)
class SplineBasis:
    """
    Clamped B-spline basis of a given degree on [w_min, w_max].

    The basis is immutable; `knots` is a read-only array of length
    num_basis + degree + 1 with the boundary knots repeated degree + 1 times.
    """

    degree: int
    num_basis: int
    knots: np.ndarray
    support: Tuple[float, float]

    @property
    def interior_knots(self) -> np.ndarray:
        return self.knots[self.degree + 1 : self.num_basis]

    def evaluate(self, w: Sequence[float], clamp: bool = True) -> np.ndarray:
        """
        Evaluate every basis function at each exposure value.

        Args:
            w: Exposure values
            clamp: Project values outside the support onto its boundary;
                when False such values raise OutOfSupport

        Returns:
            Matrix of shape (len(w), num_basis)
        """
        w = np.atleast_1d(np.asarray(w, dtype=float))
        lo, hi = self.support
        outside = (w < lo) | (w > hi)
        if np.any(outside):
            if not clamp:
                bad = w[outside][0]
                raise OutOfSupport(f"Exposure value {bad!r} outside support [{lo}, {hi}]")
            w = np.clip(w, lo, hi)

        design = BSpline.design_matrix(w, self.knots, self.degree).toarray()
        # Rounding in the recursion can leave values a hair outside [0, 1].
        return np.clip(design, 0.0, 1.0)


@dataclass(frozen=True)
class MarginalDesign:
    """Per-covariate spline design Q_nj = (B_n, x_j * B_n)."""

    matrix: np.ndarray
    intercept_design: np.ndarray

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]


def _quantile_knots(w: np.ndarray, count: int) -> np.ndarray:
    if count == 0:
        return np.empty(0)
    probs = np.linspace(0.0, 1.0, count + 2)[1:-1]
    return np.quantile(w, probs)


def build_basis(
    w_values: Sequence[float],
    num_basis: int = DEFAULT_NUM_BASIS,
    degree: int = DEFAULT_DEGREE,
) -> SplineBasis:
    """
    Build a clamped B-spline basis with interior knots at empirical quantiles.

    Args:
        w_values: Observed exposure sample
        num_basis: Number of basis functions (L_n)
        degree: Spline degree (3 for cubic)

    Returns:
        SplineBasis spanning [min(w), max(w)]
    """
    w = np.asarray(w_values, dtype=float).ravel()
    if degree < 1:
        raise InvalidBasisSize(f"Spline degree must be >= 1, got {degree}")
    if num_basis < degree + 1:
        raise InvalidBasisSize(
            f"num_basis={num_basis} is below degree + 1 = {degree + 1}"
        )
    if w.size < num_basis + 2:
        raise InvalidBasisSize(
            f"Need at least num_basis + 2 = {num_basis + 2} exposure values, got {w.size}"
        )
    if not np.all(np.isfinite(w)):
        raise DegenerateExposure("Exposure values must be finite")

    lo, hi = float(w.min()), float(w.max())
    if hi <= lo:
        raise DegenerateExposure(f"All exposure values equal {lo}")

    n_interior = num_basis - degree - 1
    interior = _quantile_knots(w, n_interior)
    if n_interior and (
        interior[0] <= lo or interior[-1] >= hi or np.any(np.diff(interior) <= 0)
    ):
        # Heavy ties collapse quantiles onto each other or onto the boundary.
        logger.warning("Quantile knots not strictly increasing inside support; using equally spaced knots")
        interior = np.linspace(lo, hi, n_interior + 2)[1:-1]

    knots = np.concatenate([np.full(degree + 1, lo), interior, np.full(degree + 1, hi)])
    knots.setflags(write=False)
    logger.debug(f"Built basis: degree={degree}, L={num_basis}, interior knots={interior.tolist()}")
    return SplineBasis(degree=degree, num_basis=num_basis, knots=knots, support=(lo, hi))


def eval_basis(basis: SplineBasis, w: float, clamp: bool = True) -> np.ndarray:
    """Evaluate the basis at a single exposure value; returns a vector of length L_n."""
    return basis.evaluate([w], clamp=clamp)[0]


def marginal_design(basis: SplineBasis, w: Sequence[float], x_j: Sequence[float]) -> MarginalDesign:
    """
    Build the marginal design for one covariate.

    Args:
        basis: Spline basis
        w: Exposure values (length n)
        x_j: Covariate column (length n)

    Returns:
        MarginalDesign with matrix [B(W_i), X_ji * B(W_i)]
    """
    w = np.asarray(w, dtype=float).ravel()
    x_j = np.asarray(x_j, dtype=float).ravel()
    if w.shape != x_j.shape:
        raise LengthMismatch(f"Exposure has length {w.size} but covariate has length {x_j.size}")

    b = basis.evaluate(w)
    return MarginalDesign(matrix=np.hstack([b, x_j[:, None] * b]), intercept_design=b)
