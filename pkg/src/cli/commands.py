"""Subcommand implementations: each builds a report and a flat table."""

import argparse
import logging
import time
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple

from ..config import Settings
from ..errors import InisFailed, InvalidSpec, UsageError
from ..screening.dataset import Dataset, load_dataset_csv
from ..screening.marginal import ScreenConfig, screen_all, sis_scores
from ..screening.permutation import PermutationConfig, permutation_threshold
from ..selection.group_scad import ScadConfig
from ..selection.inis import InisConfig, run_inis
from ..simulation.generators import SimSpec, SimulatedData, generate
from ..simulation.housing import load_housing_csv
from ..simulation.metrics import metrics
from ..simulation.replicates import (
    StudyConfig,
    run_housing_benchmark,
    run_inis_replicates,
    run_mms_comparison,
    run_permutation_study,
    summarize_rows,
)
from ..spline.basis import build_basis
from .parser import FULL_SCALE_REPS
from .report import envelope, write_csv_table, write_json_report

logger = logging.getLogger(__name__)

# Flags that only steer output, not results; left out of the config echo.
_NOT_ECHOED = {"out", "format", "timing", "debug", "workers"}


class CommandResult(NamedTuple):
    report: Dict[str, Any]
    table: List[Dict[str, Any]]


def _config_echo(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


def _workers(args: argparse.Namespace, settings: Settings) -> int:
    return args.workers if args.workers is not None else settings.workers


def _sim_spec(args: argparse.Namespace, example_id: str) -> SimSpec:
    return SimSpec(
        example_id=example_id,
        n=args.n,
        p=args.p,
        s=args.s,
        t1=args.t1,
        t2=args.t2,
        t=args.t,
        seed=args.seed,
    )


def _load_input(args: argparse.Namespace) -> Tuple[Dataset, Optional[SimulatedData]]:
    """Dataset from --input, or the training half of a --sim draw."""
    if args.input:
        return load_dataset_csv(args.input, args.response, args.exposure, args.covariates), None
    data = generate(_sim_spec(args, args.sim))
    logger.info(f"Simulated {args.sim}: n={data.train.n}, p={data.train.p}, SNR={data.snr:.2f}")
    return data.train, data


def _screen_config(args: argparse.Namespace, settings: Settings) -> ScreenConfig:
    return ScreenConfig(workers=_workers(args, settings))


def _scad_config(args: argparse.Namespace, settings: Settings) -> ScadConfig:
    grid = tuple(args.lambda_grid) if args.lambda_grid else None
    return ScadConfig(a=args.scad_a, lambda_grid=grid, workers=_workers(args, settings))


def _inis_config(args: argparse.Namespace) -> InisConfig:
    return InisConfig(
        variant=args.variant,
        K=args.K,
        p0=args.p0,
        q=args.q,
        num_permutations=args.num_permutations,
        zeta_n=args.zeta,
        max_iter=args.max_iter,
        seed=args.seed,
    )


def _permutation_config(args: argparse.Namespace) -> PermutationConfig:
    return PermutationConfig(q=args.q, num_permutations=args.num_permutations, seed=args.seed)


def _study(args: argparse.Namespace, settings: Settings, reps: int) -> StudyConfig:
    # Replicates take the pool; the fits inside each replicate run inline.
    return StudyConfig(
        reps=reps,
        seed=args.seed,
        num_basis=args.basis_size,
        degree=args.degree,
        workers=_workers(args, settings),
        inis=_inis_config(args),
        scad=ScadConfig(a=args.scad_a, lambda_grid=tuple(args.lambda_grid) if args.lambda_grid else None),
        screen=ScreenConfig(),
    )


def cmd_screen(args: argparse.Namespace, settings: Settings) -> CommandResult:
    """
    Marginal utilities, ranking and optional selection for one dataset.

    Returns:
        Report with one entry per covariate (index, name, u_hat, v_hat, rank)
        plus threshold and selection when requested
    """
    dataset, _ = _load_input(args)
    config = _screen_config(args, settings)

    if args.method == "sis":
        report = sis_scores(dataset)
    else:
        basis = build_basis(dataset.w, args.basis_size, args.degree)
        report = screen_all(dataset, basis, config)

    if args.threshold is not None:
        report = report.with_selection(args.threshold, "threshold")
    elif args.top is not None:
        report = report.with_top_k(args.top)
    elif args.permutation:
        if args.method != "nis":
            raise InvalidSpec("Permutation thresholds are only defined for --method nis")
        threshold = permutation_threshold(dataset, basis, config=_permutation_config(args), screen_config=config)
        report = report.with_selection(threshold.tau, "permutation", args.seed, q=args.q)

    rank = {int(j): r + 1 for r, j in enumerate(report.ranking)}
    covariates = [
        {
            "index": int(j),
            "name": dataset.name(int(j)),
            "u_hat": float(u),
            "v_hat": float(v),
            "rank": rank[int(j)],
        }
        for j, u, v in zip(report.indices, report.scores, report.rss)
    ]
    body = {
        "method": args.method,
        "selection_rule": report.method if report.selected is not None else None,
        "n": dataset.n,
        "p": dataset.p,
        "covariates": covariates,
        "ranking": [int(j) for j in report.ranking],
        "threshold": report.threshold,
        "selected": list(report.selected) if report.selected is not None else None,
        "flagged": list(report.flagged),
        "provenance": report.provenance,
    }
    logger.info(
        f"Top covariates: {[dataset.name(int(j)) for j in report.ranking[:5]]}"
        + (f"; {len(report.selected)} selected" if report.selected is not None else "")
    )
    return CommandResult(envelope("screen", args.seed, _config_echo(args), body), covariates)


def cmd_inis(args: argparse.Namespace, settings: Settings) -> CommandResult:
    """
    One INIS run: selected set, coefficient vectors, BIC, lambda* and the full trace.

    On a simulated input the report also carries the true support and test metrics.
    """
    dataset, simulated = _load_input(args)
    basis = build_basis(dataset.w, args.basis_size, args.degree)
    result = run_inis(
        dataset,
        basis,
        _inis_config(args),
        _scad_config(args, settings),
        _screen_config(args, settings),
    )
    model = result.model
    body: Dict[str, Any] = {
        "variant": args.variant,
        "selected": list(result.selected),
        "selected_names": [dataset.name(j) for j in result.selected],
        "intercept": model.gamma0,
        "coefficients": {str(j): model.gammas[j] for j in sorted(model.gammas)},
        "bic": model.bic,
        "lambda_star": model.lambda_star,
        "sigma2_hat": model.sigma2_hat,
        "basis": {
            "degree": basis.degree,
            "num_basis": basis.num_basis,
            "knots": basis.knots,
        },
        "trace": result.trace.to_dict(),
    }
    table = [
        {"index": j, "name": dataset.name(j), "selected": j in result.selected}
        for j in sorted(set(result.selected) | set(model.candidates))
    ]
    if simulated is not None:
        evaluation = metrics(result.selected, simulated.true_support, model, simulated.test)
        body["true_support"] = list(simulated.true_support)
        body["evaluation"] = evaluation.to_dict()
    return CommandResult(envelope("inis", args.seed, _config_echo(args), body), table)


def _housing(path: Optional[str]) -> Dataset:
    if not path:
        raise InvalidSpec("No housing CSV given; pass --input/--housing-csv or set NIS_HOUSING_CSV")
    return load_housing_csv(path)


def _reps(args: argparse.Namespace, settings: Settings) -> int:
    if args.reps is not None:
        return args.reps
    return FULL_SCALE_REPS if getattr(args, "full_scale", False) else settings.reps


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> CommandResult:
    """
    Replicate study: per-replicate rows plus median / robust-SD summary rows.

    --mode inis reports TP, FP, PE, model size and MMS; --mode mms compares the
    NIS and SIS minimum model sizes; --mode permutation reports screened model
    size and signal strength for each K in --K-list.
    """
    reps = _reps(args, settings)
    study = _study(args, settings, reps)
    spec = _sim_spec(args, args.sim)
    raw = _housing(args.housing_csv or settings.housing_csv) if args.sim == "housing_augment" else None

    if args.mode == "mms":
        if raw is not None:
            raise InvalidSpec("MMS comparison needs a simulated design with a known support")
        rows = run_mms_comparison(spec, study)
        summary = summarize_rows(rows, ["mms_nis", "mms_sis"])
    elif args.mode == "permutation":
        if raw is not None:
            raise InvalidSpec("Permutation study needs a simulated design with a known support")
        rows = run_permutation_study(spec, args.K_list, study)
        summary = summarize_rows(rows, ["tp", "size", "min_true", "max_false", "max_null"], by="K")
    else:
        rows = run_inis_replicates(spec, study, raw=raw)
        summary = summarize_rows(rows, ["tp", "fp", "pe", "size", "mms"])

    body = {"mode": args.mode, "reps": reps, "replicates": rows, "summary": summary}
    return CommandResult(envelope("simulate", args.seed, _config_echo(args), body), rows)


def cmd_bench(args: argparse.Namespace, settings: Settings) -> CommandResult:
    """Housing benchmark: C-INIS, G-INIS and SCAD on the originals over random splits."""
    raw = _housing(args.input or settings.housing_csv)
    reps = _reps(args, settings)
    rows = run_housing_benchmark(raw, args.p, args.t, _study(args, settings, reps), n_train=args.n_train)
    summary = summarize_rows(rows, ["pe", "size", "snv"], by="method")
    body = {"reps": reps, "splits": rows, "summary": summary, "originals": [raw.name(j) for j in range(raw.p)]}
    return CommandResult(envelope("bench", args.seed, _config_echo(args), body), rows)


def validate_options(args: argparse.Namespace, settings: Settings) -> None:
    """
    Build the configs a command will use so bad option values fail before any data is read.

    Raises:
        UsageError: An option value is out of range
    """
    try:
        if args.command == "screen":
            _screen_config(args, settings)
            if args.permutation:
                _permutation_config(args)
        elif args.command == "inis":
            _inis_config(args)
            _scad_config(args, settings)
            _screen_config(args, settings)
        else:
            _study(args, settings, _reps(args, settings))
    except ValueError as e:
        raise UsageError(f"Invalid options: {e}") from e


COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], CommandResult]] = {
    "screen": cmd_screen,
    "inis": cmd_inis,
    "simulate": cmd_simulate,
    "bench": cmd_bench,
}


def run_command(args: argparse.Namespace, settings: Settings) -> None:
    """
    Dispatch a parsed command line and write its output.

    Failed INIS runs still write a report holding the partial trace before the
    error propagates.
    """
    validate_options(args, settings)
    start = time.perf_counter()
    try:
        result = COMMANDS[args.command](args, settings)
    except InisFailed as e:
        if e.trace is not None:
            partial = envelope(args.command, args.seed, _config_echo(args), {"error": str(e), "trace": e.trace.to_dict()})
            write_json_report(partial, args.out)
        raise

    report = result.report
    if args.timing:
        report = {**report, "timing": {"seconds": round(time.perf_counter() - start, 6)}}

    if args.format == "csv":
        write_csv_table(result.table, args.out)
    else:
        write_json_report(report, args.out)
