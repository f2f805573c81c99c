"""Iterative screening drivers: Conditional-INIS and Greedy-INIS."""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, FrozenSet, List, NamedTuple, Optional, Set, Tuple

import numpy as np

from ..errors import InisFailed, NisError
from ..screening.dataset import Dataset
from ..screening.joint_fit import fit_joint_unpenalized
from ..screening.marginal import (
    DEFAULT_SCREEN_CONFIG,
    ScreenConfig,
    ScreenReport,
    screen_all,
    select_by_threshold,
)
from ..screening.permutation import PermutationConfig, conditional_permutation_threshold, resolve_seed
from ..spline.basis import SplineBasis
from .group_scad import ScadConfig, ScadModel, fit_group_scad

logger = logging.getLogger(__name__)

VARIANTS = ("conditional", "greedy")

__all__ = [
    "InisConfig",
    "InisIteration",
    "InisResult",
    "InisTrace",
    "default_zeta",
    "run_conditional_inis",
    "run_greedy_inis",
    "run_inis",
]


def default_zeta(n: int, num_basis: int) -> int:
    """floor(n / (L_n log n)), at least 1."""
    return max(1, int(math.floor(n / (num_basis * math.log(n)))))


@dataclass(frozen=True)
class InisConfig:
    """
    Attributes:
        variant: "conditional" or "greedy"
        K: Size of the initial conditioning set (conditional variant)
        p0: Covariates admitted per iteration (greedy variant)
        q: Permutation rank for the screening threshold
        num_permutations: Permutation rounds pooled per threshold
        zeta_n: Cap on the selected-set size; None uses default_zeta
        max_iter: Iteration limit
        seed: RNG seed for the permutations
    """

    variant: str = "conditional"
    K: int = 5
    p0: int = 1
    q: int = 1
    num_permutations: int = 1
    zeta_n: Optional[int] = None
    max_iter: int = 20
    seed: Optional[int] = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"Unknown INIS variant {self.variant!r}; expected one of {VARIANTS}")
        if self.K < 0:
            raise ValueError(f"K must be >= 0, got {self.K}")
        if self.p0 < 1:
            raise ValueError(f"p0 must be >= 1, got {self.p0}")
        if self.zeta_n is not None and self.zeta_n < 1:
            raise ValueError(f"zeta_n must be >= 1, got {self.zeta_n}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass(frozen=True)
class InisIteration:
    """One screen-then-select round."""

    iteration: int
    conditioning_set: Tuple[int, ...]
    screened: Tuple[int, ...]
    candidates: Tuple[int, ...]
    tau: Optional[float]
    selected: Tuple[int, ...]
    bic: float
    lambda_star: float
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iteration": self.iteration,
            "conditioning_set": list(self.conditioning_set),
            "screened": list(self.screened),
            "candidates": list(self.candidates),
            "tau": self.tau,
            "selected": list(self.selected),
            "bic": self.bic,
            "lambda_star": self.lambda_star,
            "seed": self.seed,
        }


@dataclass
class InisTrace:
    """Per-iteration record of an INIS run and why it stopped."""

    variant: str
    initial_set: Tuple[int, ...]
    zeta_n: int
    seed: int
    iterations: List[InisIteration] = field(default_factory=list)
    termination: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "variant": self.variant,
            "initial_set": list(self.initial_set),
            "zeta_n": self.zeta_n,
            "seed": self.seed,
            "termination": self.termination,
            "iterations": [it.to_dict() for it in self.iterations],
        }


class InisResult(NamedTuple):
    selected: Tuple[int, ...]
    model: ScadModel
    trace: InisTrace


def _iteration_seed(seed: int, iteration: int) -> int:
    return int(np.random.SeedSequence([seed, iteration]).generate_state(1, dtype=np.uint64)[0])


def _truncate(
    keep: Tuple[int, ...],
    report: ScreenReport,
    passed: Tuple[int, ...],
    zeta: int,
) -> Tuple[int, ...]:
    room = max(zeta - len(keep), 0)
    if len(passed) <= room:
        return passed
    passed_set = set(passed)
    ordered = [int(j) for j in report.ranking if int(j) in passed_set]
    logger.info(f"Screened set of {len(passed)} truncated to {room} by conditional utility")
    return tuple(sorted(ordered[:room]))


def _conditional_screen(
    dataset: Dataset,
    basis: SplineBasis,
    conditioning: Tuple[int, ...],
    config: InisConfig,
    seed: int,
    zeta: int,
    screen_config: ScreenConfig,
) -> Tuple[Tuple[int, ...], Optional[float]]:
    complement = np.setdiff1d(np.arange(dataset.p), conditioning)
    if complement.size < max(config.q, 1):
        logger.info("No covariates left to screen outside the conditioning set")
        return (), None

    perm_config = PermutationConfig(q=config.q, num_permutations=config.num_permutations, seed=seed, K=config.K)
    threshold = conditional_permutation_threshold(dataset, basis, conditioning, perm_config, screen_config)
    star = screen_all(dataset.with_response(threshold.partial_residuals), basis, screen_config, complement)
    passed = select_by_threshold(star, threshold.tau)
    logger.debug(f"{len(passed)} covariate(s) pass tau*={threshold.tau:.4g}")
    return _truncate(conditioning, star, passed, zeta), threshold.tau


def _greedy_screen(
    dataset: Dataset,
    basis: SplineBasis,
    conditioning: Tuple[int, ...],
    config: InisConfig,
    zeta: int,
    screen_config: ScreenConfig,
) -> Tuple[Tuple[int, ...], Optional[float]]:
    complement = np.setdiff1d(np.arange(dataset.p), conditioning)
    if complement.size == 0:
        return (), None

    partial = fit_joint_unpenalized(dataset, basis, conditioning).residuals
    star = screen_all(dataset.with_response(partial), basis, screen_config, complement)
    picked = star.top(config.p0)
    last = int(star.ranking[min(config.p0, complement.size) - 1])
    return _truncate(conditioning, star, picked, zeta), star.score_of(last)


def _run(
    dataset: Dataset,
    basis: SplineBasis,
    config: InisConfig,
    scad_config: ScadConfig,
    screen_config: ScreenConfig,
) -> InisResult:
    seed = resolve_seed(config.seed)
    zeta = config.zeta_n or default_zeta(dataset.n, basis.num_basis)

    if config.variant == "conditional":
        initial = screen_all(dataset, basis, screen_config).top(config.K)
    else:
        initial = ()
    trace = InisTrace(variant=config.variant, initial_set=initial, zeta_n=zeta, seed=seed)
    logger.info(f"{config.variant.capitalize()}-INIS: n={dataset.n}, p={dataset.p}, zeta_n={zeta}, initial set {list(initial)}")

    history: Set[FrozenSet[int]] = {frozenset(initial)}
    current = initial
    models: List[ScadModel] = []
    final_model: Optional[ScadModel] = None

    try:
        for step in range(config.max_iter):
            it_seed = _iteration_seed(seed, step)
            if config.variant == "conditional":
                screened, tau = _conditional_screen(dataset, basis, current, config, it_seed, zeta, screen_config)
            else:
                screened, tau = _greedy_screen(dataset, basis, current, config, zeta, screen_config)
                it_seed = None
            candidates = tuple(sorted(set(current) | set(screened)))

            model = fit_group_scad(dataset, basis, candidates, scad_config)
            selected = model.active_set
            trace.iterations.append(
                InisIteration(
                    iteration=step + 1,
                    conditioning_set=current,
                    screened=screened,
                    candidates=candidates,
                    tau=tau,
                    selected=selected,
                    bic=model.bic,
                    lambda_star=model.lambda_star,
                    seed=it_seed,
                )
            )
            logger.info(
                f"Iteration {step + 1}: {len(candidates)} candidates -> selected {list(selected)} (BIC {model.bic:.3f})"
            )

            if not selected and step >= 1 and models:
                best = min(models, key=lambda m: m.bic)
                current = best.active_set
                trace.termination = "fixed-point"
                break
            models.append(model)
            if frozenset(selected) in history:
                current = selected
                trace.termination = "fixed-point"
                break
            if len(selected) >= zeta:
                current = selected
                trace.termination = "size-cap"
                break
            history.add(frozenset(selected))
            current = selected
        else:
            trace.termination = "max-iter"

        final_model = fit_group_scad(dataset, basis, current, scad_config)
    except NisError as e:
        trace.termination = "error"
        raise InisFailed(f"{config.variant}-INIS aborted: {e}", trace=trace) from e

    logger.info(
        f"{config.variant.capitalize()}-INIS finished ({trace.termination}) after "
        f"{len(trace.iterations)} iteration(s): {list(final_model.active_set)}"
    )
    return InisResult(final_model.active_set, final_model, trace)


def run_conditional_inis(
    dataset: Dataset,
    basis: SplineBasis,
    config: InisConfig = InisConfig(),
    scad_config: ScadConfig = ScadConfig(),
    screen_config: ScreenConfig = DEFAULT_SCREEN_CONFIG,
) -> InisResult:
    """
    Conditional-INIS.

    Step 0 takes the top-K marginal utilities as conditioning set. Each
    iteration regresses Y on the current set, screens the remaining
    covariates on the partial residual against a conditional permutation
    threshold, runs group-SCAD on the union and stops when a selected set
    repeats, reaches zeta_n, or max_iter is hit.

    Returns:
        (final selected set, group-SCAD model refit on it, trace)
    """
    return _run(dataset, basis, replace(config, variant="conditional"), scad_config, screen_config)


def run_greedy_inis(
    dataset: Dataset,
    basis: SplineBasis,
    config: InisConfig = InisConfig(variant="greedy"),
    scad_config: ScadConfig = ScadConfig(),
    screen_config: ScreenConfig = DEFAULT_SCREEN_CONFIG,
) -> InisResult:
    """
    Greedy-INIS: start from the empty set and admit the top p0 covariates on
    the partial residual each iteration, followed by group-SCAD.
    """
    return _run(dataset, basis, replace(config, variant="greedy"), scad_config, screen_config)


def run_inis(
    dataset: Dataset,
    basis: SplineBasis,
    config: InisConfig,
    scad_config: ScadConfig = ScadConfig(),
    screen_config: ScreenConfig = DEFAULT_SCREEN_CONFIG,
) -> InisResult:
    """Dispatch on config.variant."""
    if config.variant == "greedy":
        return run_greedy_inis(dataset, basis, config, scad_config, screen_config)
    return run_conditional_inis(dataset, basis, config, scad_config, screen_config)
