"""Command-line argument parsing."""

import argparse
import math
from typing import List, Optional, Sequence

from ..selection.inis import VARIANTS
from ..simulation.generators import EXAMPLES
from ..spline.basis import DEFAULT_DEGREE, DEFAULT_NUM_BASIS

MODES = ("inis", "mms", "permutation")
FULL_SCALE_REPS = 200


def _float(text: str) -> float:
    """float() with an argparse error; pass negative values as --threshold=-inf."""
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values or any(not math.isfinite(v) or v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"lambda grid must be nonnegative finite numbers, got {text!r}")
    return values


def _int_list(text: str) -> List[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError(f"expected nonnegative integers, got {text!r}")
    return values


def _name_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    parent.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Worker-pool width; -1 uses all cores (or set NIS_WORKERS env var)",
    )
    parent.add_argument("--out", default=None, help="Output file (default: stdout)")
    parent.add_argument("--format", choices=("json", "csv"), default="json", help="Output format (default: json)")
    parent.add_argument("--basis-size", type=int, default=DEFAULT_NUM_BASIS, help="B-spline basis size L_n (default: 7)")
    parent.add_argument("--degree", type=int, default=DEFAULT_DEGREE, help="Spline degree (default: 3, cubic)")
    parent.add_argument("--timing", action="store_true", help="Include wall-clock timing in the report")
    parent.add_argument("--debug", action="store_true", help="Enable debug logging")
    return parent


def _data_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    source = parent.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", help="CSV file with a header row")
    source.add_argument("--sim", choices=EXAMPLES[:-1], help="Draw a simulated training set instead of reading a CSV")
    parent.add_argument("--response", default="y", help="Response column (default: y)")
    parent.add_argument("--exposure", default="w", help="Exposure column (default: w)")
    parent.add_argument("--covariates", type=_name_list, default=None, help="Comma-separated covariate columns (default: all others)")
    _design_args(parent)
    return parent


def _design_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=400, help="Simulated training size (default: 400)")
    parser.add_argument("--p", type=int, default=1000, help="Number of covariates (default: 1000)")
    parser.add_argument("--s", type=int, default=4, help="Nonzero coefficients in ex1 (default: 4)")
    parser.add_argument("--t1", type=float, default=0.0, help="Covariate correlation control (default: 0)")
    parser.add_argument("--t2", type=float, default=0.0, help="Covariate/exposure correlation control (default: 0)")
    parser.add_argument("--t", type=float, default=2.0, help="Artificial predictor correlation control (default: 2)")


def _method_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--variant", choices=VARIANTS, default="conditional", help="INIS variant (default: conditional)")
    parent.add_argument("--K", type=int, default=5, help="Initial conditioning-set size (default: 5)")
    parent.add_argument("--q", type=int, default=1, help="Permutation rank of the threshold (default: 1)")
    parent.add_argument("--p0", type=int, default=1, help="Covariates admitted per greedy step (default: 1)")
    parent.add_argument("--zeta", type=int, default=None, help="Selected-set size cap (default: n / (L_n log n))")
    parent.add_argument("--num-permutations", type=int, default=1, help="Permutation rounds pooled (default: 1)")
    parent.add_argument("--max-iter", type=int, default=20, help="INIS iteration limit (default: 20)")
    parent.add_argument("--lambda-grid", type=_float_list, default=None, help="Comma-separated SCAD lambda values")
    parent.add_argument("--scad-a", type=float, default=3.7, help="SCAD shape parameter (default: 3.7)")
    return parent


def build_parser() -> argparse.ArgumentParser:
    """Parser with the screen, inis, simulate and bench subcommands."""
    parser = argparse.ArgumentParser(
        prog="nis",
        description="Nonparametric independence screening for varying-coefficient models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parent()
    data = _data_parent()
    method = _method_parent()

    screen = sub.add_parser("screen", parents=[common, data], help="Rank covariates by marginal utility")
    screen.add_argument("--method", choices=("nis", "sis"), default="nis", help="Marginal utility (default: nis)")
    selection = screen.add_mutually_exclusive_group()
    selection.add_argument("--threshold", type=_float, default=None, help="Select covariates with utility >= this value")
    selection.add_argument("--permutation", action="store_true", help="Calibrate the threshold by permuting the response")
    selection.add_argument("--top", type=int, default=None, help="Select the top-ranked covariates")
    screen.add_argument("--q", type=int, default=1, help="Permutation rank of the threshold (default: 1)")
    screen.add_argument("--num-permutations", type=int, default=1, help="Permutation rounds pooled (default: 1)")

    sub.add_parser("inis", parents=[common, data, method], help="Run Conditional-INIS or Greedy-INIS")

    simulate = sub.add_parser("simulate", parents=[common, method], help="Replicate a simulation study")
    simulate.add_argument("--sim", choices=EXAMPLES, required=True, help="Simulation design")
    _design_args(simulate)
    simulate.add_argument("--mode", choices=MODES, default="inis", help="Study to run (default: inis)")
    simulate.add_argument("--reps", type=int, default=None, help="Replicates (or set NIS_REPS env var; default: 20)")
    simulate.add_argument("--full-scale", action="store_true", help=f"Use {FULL_SCALE_REPS} replicates unless --reps is given")
    simulate.add_argument("--K-list", type=_int_list, default=[0, 1, 4, 8], help="Conditioning sizes for --mode permutation")
    simulate.add_argument("--housing-csv", default=None, help="Housing CSV for housing_augment (or set NIS_HOUSING_CSV)")

    bench = sub.add_parser("bench", parents=[common, method], help="Housing benchmark with artificial predictors")
    bench.add_argument("--input", default=None, help="Housing CSV (or set NIS_HOUSING_CSV env var)")
    bench.add_argument("--p", type=int, default=1000, help="Covariates after augmentation (default: 1000)")
    bench.add_argument("--t", type=float, default=2.0, help="Artificial predictor correlation control (default: 2)")
    bench.add_argument("--n-train", type=int, default=406, help="Training rows per split (default: 406)")
    bench.add_argument("--reps", type=int, default=None, help="Random splits (default: 20)")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command line arguments."""
    return build_parser().parse_args(argv)
