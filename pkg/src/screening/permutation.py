"""Permutation-calibrated screening thresholds, unconditional and conditional."""

import logging
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence

import numpy as np

from ..errors import ConditioningFitFailed, InsufficientCandidates, SingularJointDesign, UnknownIndex
from ..spline.basis import SplineBasis
from .dataset import Dataset
from .joint_fit import fit_joint_unpenalized
from .marginal import DEFAULT_SCREEN_CONFIG, ScreenConfig, fit_intercept_only, screen_all

logger = logging.getLogger(__name__)


def resolve_seed(seed: Optional[int]) -> int:
    """Return `seed`, or fresh 64-bit entropy when it is None."""
    if seed is not None:
        return int(seed)
    return int(np.random.SeedSequence().entropy % (1 << 64))


@dataclass(frozen=True)
class PermutationConfig:
    """
    Attributes:
        q: Rank of the null utility used as threshold (1 = largest)
        num_permutations: Permutation rounds pooled before ranking
        seed: RNG seed; None draws one
        K: Conditioning-set size for the conditional variant
    """

    q: int = 1
    num_permutations: int = 1
    seed: Optional[int] = 0
    K: int = 5

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"q must be >= 1, got {self.q}")
        if self.num_permutations < 1:
            raise ValueError(f"num_permutations must be >= 1, got {self.num_permutations}")
        if self.K < 0:
            raise ValueError(f"K must be >= 0, got {self.K}")


class ThresholdResult(NamedTuple):
    tau: float
    null_scores: np.ndarray


class ConditionalThreshold(NamedTuple):
    tau: float
    partial_residuals: np.ndarray
    null_scores: np.ndarray
    candidates: np.ndarray


def _qth_largest(values: np.ndarray, q: int) -> float:
    return float(np.sort(values)[::-1][q - 1])


def _pooled_null_scores(
    dataset: Dataset,
    basis: SplineBasis,
    response: np.ndarray,
    candidates: np.ndarray,
    config: PermutationConfig,
    screen_config: ScreenConfig,
    permutations: Optional[Sequence[np.ndarray]],
) -> np.ndarray:
    rng = np.random.default_rng(resolve_seed(config.seed))
    pooled: List[np.ndarray] = []
    for r in range(config.num_permutations):
        perm = np.asarray(permutations[r]) if permutations is not None else rng.permutation(dataset.n)
        decoupled = dataset.with_response(response[perm])
        pooled.append(screen_all(decoupled, basis, screen_config, candidates).scores)
    return np.concatenate(pooled)


def permutation_threshold(
    dataset: Dataset,
    basis: SplineBasis,
    candidates: Optional[Iterable[int]] = None,
    config: PermutationConfig = PermutationConfig(),
    screen_config: ScreenConfig = DEFAULT_SCREEN_CONFIG,
    permutations: Optional[Sequence[np.ndarray]] = None,
) -> ThresholdResult:
    """
    Null-model screening threshold from randomly decoupled data.

    The response is permuted while W and X stay in place, the marginal
    utilities of the candidates are recomputed, and the qth largest value
    pooled over all rounds is the threshold.

    Args:
        dataset: Data
        basis: Spline basis
        candidates: Covariates to score; all by default
        config: Permutation options
        screen_config: Marginal fit options
        permutations: Explicit permutations, one per round (overrides the RNG)

    Returns:
        (tau_q, pooled null utilities)
    """
    candidates = np.arange(dataset.p) if candidates is None else np.asarray(sorted(set(candidates)), dtype=int)
    if candidates.size < config.q:
        raise InsufficientCandidates(f"{candidates.size} candidate(s) for q={config.q}")

    null_scores = _pooled_null_scores(
        dataset, basis, dataset.y, candidates, config, screen_config, permutations
    )
    tau = _qth_largest(null_scores, config.q)
    logger.debug(f"Permutation threshold tau_{config.q}={tau:.6g} over {candidates.size} candidates")
    return ThresholdResult(tau, null_scores)


def conditional_permutation_threshold(
    dataset: Dataset,
    basis: SplineBasis,
    conditioning_set: Iterable[int],
    config: PermutationConfig = PermutationConfig(),
    screen_config: ScreenConfig = DEFAULT_SCREEN_CONFIG,
    permutations: Optional[Sequence[np.ndarray]] = None,
) -> ConditionalThreshold:
    """
    Screening threshold from permuted partial residuals.

    Y is regressed on the conditioning set, the partial residual Y* is
    permuted, and the qth largest null utility over covariates outside the
    conditioning set is returned. An empty conditioning set reduces to the
    unconditional permutation of Y.

    Args:
        dataset: Data
        basis: Spline basis
        conditioning_set: Covariates to condition on
        config: Permutation options
        screen_config: Marginal fit options
        permutations: Explicit permutations, one per round

    Returns:
        (tau_q*, partial residuals Y*, pooled null utilities, screened candidates)
    """
    members = sorted(set(int(j) for j in conditioning_set))
    if members and (members[0] < 0 or members[-1] >= dataset.p):
        raise UnknownIndex(f"Conditioning indices outside 0..{dataset.p - 1}: {members}")
    candidates = np.setdiff1d(np.arange(dataset.p), members)

    if not members:
        a0 = fit_intercept_only(dataset, basis, screen_config).a0_fitted
        result = permutation_threshold(dataset, basis, candidates, config, screen_config, permutations)
        return ConditionalThreshold(result.tau, dataset.y - a0, result.null_scores, candidates)

    try:
        partial = fit_joint_unpenalized(dataset, basis, members).residuals
    except SingularJointDesign as e:
        raise ConditioningFitFailed(f"Joint fit on conditioning set {members} failed: {e}") from e

    if candidates.size < config.q:
        raise InsufficientCandidates(f"{candidates.size} candidate(s) outside the conditioning set for q={config.q}")

    null_scores = _pooled_null_scores(
        dataset, basis, partial, candidates, config, screen_config, permutations
    )
    tau = _qth_largest(null_scores, config.q)
    logger.debug(f"Conditional threshold tau*_{config.q}={tau:.6g} given {len(members)} covariate(s)")
    return ConditionalThreshold(tau, partial, null_scores, candidates)
