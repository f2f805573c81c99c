#!/usr/bin/env python3
"""
Varying-coefficient screening CLI

Ranks covariates by nonparametric marginal utility, runs Conditional-INIS
and Greedy-INIS, and replicates the simulation and housing studies.
"""

import logging
import sys
from typing import Optional, Sequence

from src.cli import parse_args, run_command
from src.config import Settings
from src.errors import NisError

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"

logger = logging.getLogger(__name__)

NUMERIC_ERROR = 4


def configure_logging(settings: Settings, debug: bool = False) -> None:
    """
    Log to stderr, and to a file when NIS_LOG_FILE is set.

    Args:
        settings: Environment settings
        debug: Force DEBUG level
    """
    handlers = [logging.StreamHandler()]
    if settings.log_file:
        handlers.append(logging.FileHandler(settings.log_file, mode="w", encoding="utf-8"))

    level = logging.DEBUG if debug or settings.debug else getattr(logging, settings.log_level, logging.INFO)
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=handlers,
    )
    logging.getLogger().setLevel(level)

    # Reduce noise from numerical libraries
    logging.getLogger("numexpr").setLevel(logging.WARNING)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point.

    Returns:
        Process exit code: 0 success, 2 usage, 3 schema or I/O, 4 numeric, 5 other
    """
    settings = Settings.from_env()
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(settings, debug=args.debug)
    logger.info(f"Running {args.command} (seed {args.seed})")

    try:
        run_command(args, settings)
    except KeyboardInterrupt:
        logger.info("Interrupted, shutting down...")
        return 130
    except NisError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except (ValueError, ArithmeticError) as e:
        logger.error(f"Numerical failure: {type(e).__name__}: {e}")
        return NUMERIC_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return 3

    return 0


if __name__ == "__main__":
    sys.exit(main())
