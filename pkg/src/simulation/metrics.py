"""Selection and prediction metrics plus robust summaries."""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence

import numpy as np

from ..errors import TooFewValues
from ..screening.dataset import Dataset
from ..screening.marginal import ScreenReport, minimum_model_size
from ..selection.group_scad import ScadModel

logger = logging.getLogger(__name__)

# Interquartile range of the standard normal distribution.
IQR_NORMAL = 1.349


@dataclass(frozen=True)
class EvalMetrics:
    tp: int
    fp: int
    pe: float
    size: int
    mms: Optional[int] = None

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


def metrics(
    selected: Iterable[int],
    true_support: Iterable[int],
    model: ScadModel,
    test: Dataset,
    report: Optional[ScreenReport] = None,
) -> EvalMetrics:
    """
    True/false positives and test mean squared prediction error.

    Args:
        selected: Selected covariates
        true_support: True covariates
        model: Model fitted on the training data
        test: Held-out data
        report: Screening report for the minimum model size, optional

    Returns:
        EvalMetrics; mms is set when a report is given and the support is nonempty
    """
    selected = set(int(j) for j in selected)
    truth = set(int(j) for j in true_support)
    pe = float(np.mean((test.y - model.predict(test)) ** 2))
    mms = minimum_model_size(report, truth) if report is not None and truth else None
    return EvalMetrics(
        tp=len(selected & truth),
        fp=len(selected - truth),
        pe=pe,
        size=len(selected),
        mms=mms,
    )


def robust_sd(values: Sequence[float]) -> float:
    """
    Normal-consistent robust standard deviation IQR / 1.349.

    Quartiles use linear interpolation between order statistics (numpy's
    default), so (1, 2, 3, 4, 5) has IQR 2.
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise TooFewValues(f"robust_sd needs at least 2 values, got {values.size}")
    q1, q3 = np.percentile(values, [25, 75])
    return float((q3 - q1) / IQR_NORMAL)


def summarize(rows: Sequence[Mapping[str, object]], columns: Sequence[str]) -> Dict[str, Dict[str, float]]:
    """
    Median, mean and robust SD for each numeric column across replicate rows.

    NaN entries are ignored; a column with a single finite value has robust SD 0.
    """
    summary: Dict[str, Dict[str, float]] = {}
    for column in columns:
        values = np.array([row.get(column, np.nan) for row in rows], dtype=float)
        values = values[np.isfinite(values)]
        if values.size == 0:
            summary[column] = {"median": float("nan"), "mean": float("nan"), "robust_sd": float("nan"), "count": 0}
            continue
        summary[column] = {
            "median": float(np.median(values)),
            "mean": float(np.mean(values)),
            "robust_sd": robust_sd(values) if values.size >= 2 else 0.0,
            "count": int(values.size),
        }
    return summary
