"""Marginal varying-coefficient fits, marginal utilities and screening reports.

Norms follow the empirical convention ||v||_n^2 = (1/n) * sum(v_i^2) throughout.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..errors import SingularDesign, UnknownIndex
from ..spline.basis import SplineBasis
from .dataset import Dataset
from .pool import map_ordered

logger = logging.getLogger(__name__)

CONDITION_CAP = 1e10
RIDGE_SCALE = 1e-8
CHUNK_SIZE = 64


@dataclass(frozen=True)
class ScreenConfig:
    """
    Numerical options for marginal screening.

    Attributes:
        ridge_fallback: Add ridge jitter instead of failing on rank-deficient designs
        condition_cap: Condition number above which a design counts as singular
        standardize: Standardize covariates before fitting
        workers: Thread pool width for screen_all
        chunk_size: Covariates per work unit; fixed so results do not depend on workers
    """

    ridge_fallback: bool = True
    condition_cap: float = CONDITION_CAP
    standardize: bool = False
    workers: int = 1
    chunk_size: int = CHUNK_SIZE


DEFAULT_SCREEN_CONFIG = ScreenConfig()


def sq_norm(v: np.ndarray) -> float:
    """Empirical squared norm (1/n) * sum(v^2)."""
    return float(np.mean(np.square(v)))


class InterceptFit(NamedTuple):
    eta0_hat: np.ndarray
    a0_fitted: np.ndarray


@dataclass(frozen=True)
class MarginalFit:
    """Marginal spline fit of the response on (W, X_j)."""

    j: int
    eta_hat: np.ndarray
    theta_hat: np.ndarray
    u_hat: float
    v_hat: float
    flagged: bool = False

    def coefficient_functions(self, basis: SplineBasis, grid: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """Evaluate the fitted intercept a_nj(w) and slope b_nj(w) functions on a grid."""
        b = basis.evaluate(grid)
        return b @ self.eta_hat, b @ self.theta_hat


@dataclass(frozen=True)
class ScreenReport:
    """
    Marginal utilities for a set of candidate covariates plus an optional selection.

    `indices[k]` is the covariate behind `scores[k]` and `rss[k]`; indices are
    0-based column positions in the dataset.
    """

    scores: np.ndarray
    rss: np.ndarray
    indices: np.ndarray
    ranking: np.ndarray
    threshold: Optional[float] = None
    selected: Optional[Tuple[int, ...]] = None
    method: str = "scores"
    seed: Optional[int] = None
    flagged: Tuple[int, ...] = ()
    provenance: Dict[str, Any] = field(default_factory=dict)

    def score_of(self, j: int) -> float:
        pos = np.flatnonzero(self.indices == j)
        if pos.size == 0:
            raise UnknownIndex(f"Covariate {j} not in this report")
        return float(self.scores[pos[0]])

    def top(self, k: int) -> Tuple[int, ...]:
        return tuple(sorted(int(j) for j in self.ranking[: max(k, 0)]))

    def with_selection(
        self,
        threshold: float,
        method: str,
        seed: Optional[int] = None,
        **provenance: Any,
    ) -> "ScreenReport":
        """Copy of the report with a threshold applied."""
        return replace(
            self,
            threshold=float(threshold),
            selected=select_by_threshold(self, threshold),
            method=method,
            seed=seed,
            provenance={**self.provenance, **provenance},
        )

    def with_top_k(self, k: int) -> "ScreenReport":
        top = self.ranking[: max(k, 0)]
        threshold = float(self.scores[np.isin(self.indices, top)].min()) if top.size else float("inf")
        return replace(self, threshold=threshold, selected=self.top(k), method="top-K", provenance={**self.provenance, "K": k})


def rank_scores(scores: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Covariate indices by decreasing score, ties broken by ascending index."""
    order = np.lexsort((indices, -np.asarray(scores)))
    return np.asarray(indices)[order]


def _least_squares(
    design: np.ndarray,
    y: np.ndarray,
    config: ScreenConfig,
    label: str,
) -> Tuple[np.ndarray, np.ndarray, bool]:
    q, r = np.linalg.qr(design)
    with np.errstate(divide="ignore", invalid="ignore"):
        condition = np.linalg.cond(r)
    if condition <= config.condition_cap:
        coef = linalg.solve_triangular(r, q.T @ y)
        return coef, design @ coef, False

    if not config.ridge_fallback:
        raise SingularDesign(f"{label} design is singular (condition {condition:.3g})", condition=condition)

    gram = design.T @ design
    jitter = RIDGE_SCALE * np.trace(gram) / gram.shape[0]
    coef = linalg.solve(gram + jitter * np.eye(gram.shape[0]), design.T @ y, assume_a="pos")
    logger.warning(f"{label} design ill-conditioned ({condition:.3g}); ridge jitter {jitter:.3g} applied")
    return coef, design @ coef, True


def fit_intercept_only(
    dataset: Dataset,
    basis: SplineBasis,
    config: ScreenConfig = DEFAULT_SCREEN_CONFIG,
    b: Optional[np.ndarray] = None,
) -> InterceptFit:
    """
    Fit the intercept-only model Y ~ B(W) eta_0.

    Args:
        dataset: Data
        basis: Spline basis
        config: Numerical options
        b: Precomputed basis matrix B(W), if available

    Returns:
        (eta0_hat, fitted values a_n0(W_i))
    """
    if b is None:
        b = basis.evaluate(dataset.w)
    coef, fitted, _ = _least_squares(b, dataset.y, config, "Intercept")
    return InterceptFit(coef, fitted)


class _ChunkResult(NamedTuple):
    u: np.ndarray
    v: np.ndarray
    flagged: np.ndarray
    coefs: Optional[np.ndarray]


def _fit_chunk(
    b: np.ndarray,
    y: np.ndarray,
    x_cols: np.ndarray,
    a0_norm: float,
    config: ScreenConfig,
    keep_coefs: bool = False,
) -> _ChunkResult:
    n, n_basis = b.shape
    m = x_cols.shape[1]
    y_norm = sq_norm(y)
    design = np.empty((m, n, 2 * n_basis))
    design[:, :, :n_basis] = b
    design[:, :, n_basis:] = x_cols.T[:, :, None] * b

    q, r = np.linalg.qr(design)
    qty = np.matmul(np.swapaxes(q, 1, 2), y)
    with np.errstate(divide="ignore", invalid="ignore"):
        condition = np.linalg.cond(r)
    ok = condition <= config.condition_cap

    u = np.full(m, -np.inf)
    v = np.full(m, np.inf)
    coefs = np.zeros((m, 2 * n_basis)) if keep_coefs else None

    fitted_norm = np.sum(qty[ok] ** 2, axis=1) / n
    u[ok] = fitted_norm - a0_norm
    # Pythagoras: the fit is an orthogonal projection of y.
    v[ok] = np.maximum(y_norm - fitted_norm, 0.0)
    if keep_coefs and np.any(ok):
        coefs[ok] = np.linalg.solve(r[ok], qty[ok][..., None])[..., 0]

    for k in np.flatnonzero(~ok):
        if not config.ridge_fallback:
            continue
        gram = design[k].T @ design[k]
        jitter = RIDGE_SCALE * np.trace(gram) / (2 * n_basis)
        coef = linalg.solve(gram + jitter * np.eye(2 * n_basis), design[k].T @ y, assume_a="pos")
        fitted = design[k] @ coef
        u[k] = sq_norm(fitted) - a0_norm
        v[k] = sq_norm(y - fitted)
        if keep_coefs:
            coefs[k] = coef

    return _ChunkResult(u, v, ~ok, coefs)


def fit_marginal(
    dataset: Dataset,
    basis: SplineBasis,
    j: int,
    config: ScreenConfig = DEFAULT_SCREEN_CONFIG,
) -> MarginalFit:
    """
    Fit the marginal model Y ~ B(W) eta_j + X_j B(W) theta_j for one covariate.

    Args:
        dataset: Data
        basis: Spline basis
        j: Covariate index (0-based)
        config: Numerical options

    Returns:
        MarginalFit with utility u_hat = ||a_nj + b_nj X_j||_n^2 - ||a_n0||_n^2
        and residual score v_hat = ||Y - a_nj - b_nj X_j||_n^2
    """
    if not 0 <= j < dataset.p:
        raise UnknownIndex(f"Covariate index {j} outside 0..{dataset.p - 1}")

    b = basis.evaluate(dataset.w)
    a0 = fit_intercept_only(dataset, basis, config, b=b).a0_fitted
    result = _fit_chunk(b, dataset.y, dataset.x[:, [j]], sq_norm(a0), config, keep_coefs=True)
    flagged = bool(result.flagged[0])
    if flagged and not config.ridge_fallback:
        raise SingularDesign(f"Marginal design for covariate {j} is singular", index=j)

    n_basis = basis.num_basis
    coef = result.coefs[0]
    return MarginalFit(
        j=j,
        eta_hat=coef[:n_basis],
        theta_hat=coef[n_basis:],
        u_hat=float(result.u[0]),
        v_hat=float(result.v[0]),
        flagged=flagged,
    )


def screen_all(
    dataset: Dataset,
    basis: SplineBasis,
    config: ScreenConfig = DEFAULT_SCREEN_CONFIG,
    candidates: Optional[Iterable[int]] = None,
) -> ScreenReport:
    """
    Compute marginal utilities for every candidate covariate.

    Covariates whose design is singular with the ridge fallback disabled get
    score -inf and are listed in `flagged`; with the fallback on they keep a
    finite ridge score and are still flagged.

    Args:
        dataset: Data
        basis: Spline basis
        config: Numerical options (worker count, fallback)
        candidates: Covariate indices to score; all by default

    Returns:
        ScreenReport with scores and ranking, no threshold
    """
    if config.standardize:
        dataset = dataset.standardized()

    indices = np.arange(dataset.p) if candidates is None else np.asarray(sorted(set(candidates)), dtype=int)
    if indices.size and (indices[0] < 0 or indices[-1] >= dataset.p):
        raise UnknownIndex(f"Candidate indices outside 0..{dataset.p - 1}")

    b = basis.evaluate(dataset.w)
    a0_norm = sq_norm(fit_intercept_only(dataset, basis, config, b=b).a0_fitted)

    step = max(config.chunk_size, 1)
    chunks = [indices[i : i + step] for i in range(0, indices.size, step)]
    results = map_ordered(
        lambda cols: _fit_chunk(b, dataset.y, dataset.x[:, cols], a0_norm, config),
        chunks,
        config.workers,
    )

    scores = np.concatenate([r.u for r in results]) if results else np.empty(0)
    rss = np.concatenate([r.v for r in results]) if results else np.empty(0)
    flags = np.concatenate([r.flagged for r in results]) if results else np.empty(0, dtype=bool)
    flagged = tuple(int(j) for j in indices[flags])
    if flagged:
        logger.warning(f"{len(flagged)} covariate(s) with singular marginal design: {list(flagged)[:10]}")

    logger.debug(f"Screened {indices.size} covariates")
    return ScreenReport(
        scores=scores,
        rss=rss,
        indices=indices,
        ranking=rank_scores(scores, indices),
        flagged=flagged,
    )


def select_by_threshold(report: ScreenReport, tau: float) -> Tuple[int, ...]:
    """Covariates with utility >= tau, in ascending index order."""
    return tuple(sorted(int(j) for j, s in zip(report.indices, report.scores) if s >= tau))


def minimum_model_size(report: ScreenReport, true_set: Iterable[int]) -> int:
    """
    Smallest r such that the top-r ranked covariates contain every true covariate.

    Args:
        report: Screening report
        true_set: True covariate indices; empty gives 0

    Returns:
        Minimum model size
    """
    true_set = set(int(j) for j in true_set)
    if not true_set:
        return 0
    position = {int(j): r for r, j in enumerate(report.ranking)}
    unknown = sorted(true_set - position.keys())
    if unknown:
        raise UnknownIndex(f"True covariates {unknown} not ranked in this report")
    return max(position[j] for j in true_set) + 1


def sis_scores(dataset: Dataset, candidates: Optional[Iterable[int]] = None) -> ScreenReport:
    """
    Linear sure independence screening: rank by absolute marginal correlation.

    The rss entry is the residual variance of the simple linear regression of
    Y on X_j, so it orders covariates inversely to the score.
    """
    indices = np.arange(dataset.p) if candidates is None else np.asarray(sorted(set(candidates)), dtype=int)
    xc = dataset.x[:, indices] - dataset.x[:, indices].mean(axis=0)
    yc = dataset.y - dataset.y.mean()
    denom = np.sqrt(np.sum(xc**2, axis=0) * np.sum(yc**2))
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.where(denom > 0, (xc.T @ yc) / denom, 0.0)
    scores = np.abs(corr)
    rss = sq_norm(yc) * (1.0 - corr**2)
    return ScreenReport(
        scores=scores,
        rss=rss,
        indices=indices,
        ranking=rank_scores(scores, indices),
        method="sis",
    )

