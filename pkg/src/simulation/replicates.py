"""Replicate drivers for the simulation studies and the housing benchmark."""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from ..errors import NisError
from ..screening.dataset import Dataset
from ..screening.marginal import (
    DEFAULT_SCREEN_CONFIG,
    ScreenConfig,
    minimum_model_size,
    screen_all,
    select_by_threshold,
    sis_scores,
)
from ..screening.permutation import PermutationConfig, conditional_permutation_threshold
from ..screening.pool import map_ordered
from ..selection.group_scad import ScadConfig, fit_group_scad
from ..selection.inis import InisConfig, run_inis
from ..spline.basis import DEFAULT_DEGREE, DEFAULT_NUM_BASIS, build_basis
from .generators import SimSpec, SimulatedData, generate
from .metrics import metrics, summarize

logger = logging.getLogger(__name__)

HOUSING_TRAIN_SIZE = 406

# Returns covariate indices in decreasing order of importance.
Ranker = Callable[[Dataset], Sequence[int]]


@dataclass(frozen=True)
class StudyConfig:
    """
    Shared knobs of a replicate study.

    Attributes:
        reps: Number of replicates
        seed: Base seed; replicate r uses SeedSequence([seed, r])
        num_basis: B-spline basis size L_n
        degree: Spline degree
        workers: Replicates run concurrently
        inis: INIS options (the seed is replaced per replicate)
        scad: Group-SCAD options
        screen: Marginal fit options
    """

    reps: int = 20
    seed: int = 0
    num_basis: int = DEFAULT_NUM_BASIS
    degree: int = DEFAULT_DEGREE
    workers: int = 1
    inis: InisConfig = field(default_factory=InisConfig)
    scad: ScadConfig = field(default_factory=ScadConfig)
    screen: ScreenConfig = DEFAULT_SCREEN_CONFIG

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")


def replicate_seed(seed: int, replicate: int) -> int:
    """Seed of replicate `replicate`, independent of how many replicates run."""
    return int(np.random.SeedSequence([seed, replicate]).generate_state(1)[0])


def _replicates(study: StudyConfig, fn: Callable[[int, int], List[Dict[str, Any]]]) -> List[Dict[str, Any]]:
    seeds = [(r, replicate_seed(study.seed, r)) for r in range(study.reps)]
    chunks = map_ordered(lambda item: fn(*item), seeds, study.workers)
    return [row for chunk in chunks for row in chunk]


def _draw(spec: SimSpec, seed: int, raw: Optional[Dataset]) -> SimulatedData:
    return generate(replace(spec, seed=seed), raw=raw)


def run_inis_replicates(
    spec: SimSpec,
    study: StudyConfig = StudyConfig(),
    raw: Optional[Dataset] = None,
    with_mms: bool = True,
) -> List[Dict[str, Any]]:
    """
    Run INIS on `study.reps` independent draws of a design.

    Args:
        spec: Simulation design; its seed is replaced per replicate
        study: Replicate and method options
        raw: Real dataset for housing_augment
        with_mms: Also compute the NIS minimum model size

    Returns:
        One row per replicate with tp, fp, pe, size, mms, iteration count and
        termination reason; failed replicates carry an `error` entry and NaN metrics
    """

    def one(r: int, seed: int) -> List[Dict[str, Any]]:
        data = _draw(spec, seed, raw)
        row: Dict[str, Any] = {"replicate": r, "seed": seed, "variant": study.inis.variant}
        try:
            basis = build_basis(data.train.w, study.num_basis, study.degree)
            result = run_inis(data.train, basis, replace(study.inis, seed=seed), study.scad, study.screen)
            report = screen_all(data.train, basis, study.screen) if with_mms else None
            row.update(metrics(result.selected, data.true_support, result.model, data.test, report).to_dict())
            row.update(
                selected=list(result.selected),
                iterations=len(result.trace.iterations),
                termination=result.trace.termination,
            )
        except NisError as e:
            logger.warning(f"Replicate {r} failed: {e}")
            row.update(tp=np.nan, fp=np.nan, pe=np.nan, size=np.nan, mms=None, error=str(e))
        logger.debug(f"Replicate {r}: {row}")
        return [row]

    logger.info(f"Running {study.reps} {study.inis.variant}-INIS replicate(s) of {spec.example_id}")
    return _replicates(study, one)


def _rank_mms(ranking: Sequence[int], truth: Sequence[int]) -> int:
    position = {int(j): r for r, j in enumerate(ranking)}
    return max(position.get(int(j), len(position)) for j in truth) + 1 if truth else 0


def run_mms_comparison(
    spec: SimSpec,
    study: StudyConfig = StudyConfig(),
    lasso_ranker: Optional[Ranker] = None,
) -> List[Dict[str, Any]]:
    """
    Minimum model size of NIS against linear SIS per replicate.

    Args:
        spec: Simulation design
        study: Replicate options
        lasso_ranker: Optional external ranking (for instance a Lasso path
            entry order) reported as mms_lasso

    Returns:
        Rows with replicate, seed, mms_nis, mms_sis and optionally mms_lasso
    """

    def one(r: int, seed: int) -> List[Dict[str, Any]]:
        data = _draw(spec, seed, None)
        basis = build_basis(data.train.w, study.num_basis, study.degree)
        row: Dict[str, Any] = {
            "replicate": r,
            "seed": seed,
            "mms_nis": minimum_model_size(screen_all(data.train, basis, study.screen), data.true_support),
            "mms_sis": minimum_model_size(sis_scores(data.train), data.true_support),
        }
        if lasso_ranker is not None:
            row["mms_lasso"] = _rank_mms(lasso_ranker(data.train), data.true_support)
        return [row]

    logger.info(f"Comparing NIS and SIS minimum model sizes over {study.reps} replicate(s)")
    return _replicates(study, one)


def run_permutation_study(
    spec: SimSpec,
    K_values: Sequence[int] = (0, 1, 4, 8),
    study: StudyConfig = StudyConfig(),
) -> List[Dict[str, Any]]:
    """
    Screened model size and marginal signal strength under conditional
    permutation, for several conditioning-set sizes.

    For each K the top-K marginal covariates form the conditioning set; the
    remaining covariates are screened on the partial residual against the
    permutation threshold.

    Returns:
        Rows (replicate, K) with tp, size, min_true, max_false and max_null,
        where min_true and max_false are conditional utilities of covariates
        outside the conditioning set and max_null is the largest null utility
    """
    perm_base = PermutationConfig(q=study.inis.q, num_permutations=study.inis.num_permutations)

    def one(r: int, seed: int) -> List[Dict[str, Any]]:
        data = _draw(spec, seed, None)
        train = data.train
        truth = set(data.true_support)
        basis = build_basis(train.w, study.num_basis, study.degree)
        marginal = screen_all(train, basis, study.screen)

        rows = []
        for K in K_values:
            conditioning = marginal.top(K)
            threshold = conditional_permutation_threshold(
                train, basis, conditioning, replace(perm_base, seed=seed, K=K), study.screen
            )
            star = screen_all(train.with_response(threshold.partial_residuals), basis, study.screen, threshold.candidates)
            screened = set(conditioning) | set(select_by_threshold(star, threshold.tau))
            true_scores = [s for j, s in zip(star.indices, star.scores) if int(j) in truth]
            false_scores = [s for j, s in zip(star.indices, star.scores) if int(j) not in truth]
            rows.append({
                "replicate": r,
                "seed": seed,
                "K": int(K),
                "tp": len(screened & truth),
                "size": len(screened),
                "min_true": float(min(true_scores)) if true_scores else np.nan,
                "max_false": float(max(false_scores)) if false_scores else np.nan,
                "max_null": float(np.max(threshold.null_scores)),
                "tau": threshold.tau,
            })
        return rows

    logger.info(f"Permutation study over K={list(K_values)} with {study.reps} replicate(s)")
    return _replicates(study, one)


def run_housing_benchmark(
    raw: Dataset,
    p: int = 1000,
    t: float = 2.0,
    study: StudyConfig = StudyConfig(),
    n_train: int = HOUSING_TRAIN_SIZE,
) -> List[Dict[str, Any]]:
    """
    Random-split benchmark on the housing data augmented with artificial predictors.

    Each split runs Conditional-INIS and Greedy-INIS on the augmented training
    rows and a group-SCAD fit on the original covariates alone.

    Args:
        raw: Housing data with the original covariates
        p: Total covariate count after augmentation
        t: Correlation control of the artificial predictors
        study: Replicate options; `reps` is the number of splits
        n_train: Training rows per split

    Returns:
        Rows (split, method) with pe, size and snv, the number of selected
        artificial variables
    """
    spec = SimSpec(example_id="housing_augment", n=n_train, p=p, t=t)
    originals = tuple(range(raw.p))

    def evaluate(method: str, r: int, seed: int, selected, model, test) -> Dict[str, Any]:
        return {
            "split": r,
            "seed": seed,
            "method": method,
            "pe": float(np.mean((test.y - model.predict(test)) ** 2)),
            "size": len(selected),
            "snv": sum(1 for j in selected if j >= raw.p),
            "selected": list(selected),
        }

    def one(r: int, seed: int) -> List[Dict[str, Any]]:
        data = _draw(spec, seed, raw)
        basis = build_basis(data.train.w, study.num_basis, study.degree)
        rows = []
        for variant in ("conditional", "greedy"):
            config = replace(study.inis, variant=variant, seed=seed)
            try:
                result = run_inis(data.train, basis, config, study.scad, study.screen)
            except NisError as e:
                logger.warning(f"Split {r}: {variant}-INIS failed: {e}")
                rows.append({"split": r, "seed": seed, "method": f"{variant}-inis", "pe": np.nan,
                             "size": np.nan, "snv": np.nan, "error": str(e)})
                continue
            rows.append(evaluate(f"{variant}-inis", r, seed, result.selected, result.model, data.test))
        model = fit_group_scad(data.train, basis, originals, study.scad)
        rows.append(evaluate("scad", r, seed, model.active_set, model, data.test))
        return rows

    logger.info(f"Housing benchmark: p={p}, t={t}, {study.reps} split(s) of {n_train} training rows")
    return _replicates(study, one)


def summarize_rows(
    rows: Sequence[Dict[str, Any]],
    columns: Sequence[str],
    by: Optional[str] = None,
) -> List[Dict[str, Any]]:
    """
    Flatten median / mean / robust SD summaries into table rows.

    Args:
        rows: Replicate rows
        columns: Numeric columns to summarize
        by: Optional grouping column (for instance "K" or "method")

    Returns:
        One row per group with `<column>_median`, `<column>_mean`,
        `<column>_robust_sd` entries and the replicate count
    """
    groups: Dict[Any, List[Dict[str, Any]]] = {}
    for row in rows:
        groups.setdefault(row.get(by) if by else None, []).append(row)

    table = []
    for key in sorted(groups) if by else list(groups):
        members = groups[key]
        out: Dict[str, Any] = {by: key} if by else {}
        out["count"] = len(members)
        for column, stats in summarize(members, columns).items():
            for name in ("median", "mean", "robust_sd"):
                out[f"{column}_{name}"] = stats[name]
        table.append(out)
    return table
