"""Deterministic JSON reports and CSV tables."""

import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .. import __version__

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def to_plain(value: Any) -> Any:
    """
    Convert numpy containers and scalars to JSON-native values.

    Non-finite floats become the strings "inf", "-inf" and "nan" so the output
    stays strict JSON.
    """
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_plain(v) for v in items]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, Path):
        return str(value)
    return value


def envelope(command: str, seed: Optional[int], config: Dict[str, Any], body: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a command result with the version, seed and config echo every report carries."""
    return {
        "version": __version__,
        "schema": SCHEMA_VERSION,
        "command": command,
        "seed": seed,
        "config": config,
        **body,
    }


def dumps_json(report: Dict[str, Any]) -> str:
    return json.dumps(to_plain(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json_report(report: Dict[str, Any], path: Optional[Union[str, Path]] = None) -> None:
    """
    Write a report with sorted keys; identical inputs give identical bytes.

    Args:
        report: Report mapping
        path: Output file; stdout when None
    """
    text = dumps_json(report)
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"Report written to {path}")


def _cell(value: Any) -> Any:
    plain = to_plain(value)
    if isinstance(plain, list):
        return " ".join(str(v) for v in plain)
    if isinstance(plain, dict):
        return json.dumps(plain, sort_keys=True)
    return plain


def write_csv_table(rows: Sequence[Dict[str, Any]], path: Optional[Union[str, Path]] = None) -> None:
    """
    Write one row per record with pandas; list cells are space-joined.

    Args:
        rows: Records sharing (mostly) the same keys
        path: Output file; stdout when None
    """
    frame = pd.DataFrame([{k: _cell(v) for k, v in row.items()} for row in rows])
    if path is None:
        frame.to_csv(sys.stdout, index=False, lineterminator="\n")
        return
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    logger.info(f"Table with {len(frame)} rows written to {path}")
