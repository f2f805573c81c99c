"""Unpenalized joint varying-coefficient fit on a set of covariates."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..errors import SingularJointDesign
from .dataset import Dataset
from .marginal import CONDITION_CAP, RIDGE_SCALE
from ..spline.basis import SplineBasis

logger = logging.getLogger(__name__)


def joint_design(b: np.ndarray, x: np.ndarray, members: Sequence[int]) -> np.ndarray:
    """
    Stack the intercept block and one varying-coefficient block per member.

    Args:
        b: Basis matrix B(W), shape (n, L)
        x: Covariate matrix, shape (n, p)
        members: Covariate indices, in block order

    Returns:
        Matrix [B, X_j1 * B, ..., X_jk * B] of shape (n, (k + 1) * L)
    """
    blocks = [b] + [x[:, [j]] * b for j in members]
    return np.hstack(blocks)


def ridge_or_lstsq(design: np.ndarray, y: np.ndarray, label: str = "Joint") -> Tuple[np.ndarray, bool]:
    """
    Least squares by QR, falling back to a ridge-stabilized normal-equation
    solve when the design is rank deficient or has more columns than rows.

    Returns:
        (coefficients, whether the ridge fallback was used)
    """
    n, k = design.shape
    if k < n:
        q, r = np.linalg.qr(design)
        with np.errstate(divide="ignore", invalid="ignore"):
            condition = np.linalg.cond(r)
        if condition <= CONDITION_CAP:
            return linalg.solve_triangular(r, q.T @ y), False
        logger.warning(f"{label} design ill-conditioned ({condition:.3g}); using ridge fallback")
    else:
        logger.warning(f"{label} design over-parameterized ({k} columns, {n} rows); using ridge fallback")

    gram = design.T @ design
    jitter = RIDGE_SCALE * np.trace(gram) / k
    try:
        coef = linalg.solve(gram + jitter * np.eye(k), design.T @ y, assume_a="pos")
    except (linalg.LinAlgError, ValueError) as e:
        raise SingularJointDesign(f"{label} design singular after ridge fallback: {e}") from e
    if not np.all(np.isfinite(coef)):
        raise SingularJointDesign(f"{label} fit produced non-finite coefficients")
    return coef, True


@dataclass(frozen=True)
class JointFit:
    """Joint spline least-squares fit of Y on the intercept and a covariate set."""

    members: Tuple[int, ...]
    gamma0: np.ndarray
    gammas: Dict[int, np.ndarray]
    fitted: np.ndarray
    residuals: np.ndarray
    ridge: bool = False


def fit_joint_unpenalized(dataset: Dataset, basis: SplineBasis, members: Iterable[int]) -> JointFit:
    """
    Regress Y on {(W, X_j), j in members} with spline coefficient functions.

    Args:
        dataset: Data
        basis: Spline basis
        members: Covariate indices; empty gives the intercept-only fit

    Returns:
        JointFit whose residuals are the partial residuals
        Y* = Y - beta_0(W) - sum_j X_j beta_j(W)
    """
    members = tuple(sorted(set(int(j) for j in members)))
    b = basis.evaluate(dataset.w)
    design = joint_design(b, dataset.x, members)
    coef, ridge = ridge_or_lstsq(design, dataset.y)

    n_basis = basis.num_basis
    fitted = design @ coef
    gammas = {j: coef[(k + 1) * n_basis : (k + 2) * n_basis] for k, j in enumerate(members)}
    return JointFit(
        members=members,
        gamma0=coef[:n_basis],
        gammas=gammas,
        fitted=fitted,
        residuals=dataset.y - fitted,
        ridge=ridge,
    )
