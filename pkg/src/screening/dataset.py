"""Response / exposure / covariate container and CSV ingestion."""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..errors import LengthMismatch, MissingColumns, SchemaError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dataset:
    """
    Data for the varying-coefficient model Y = beta(W)^T X + eps.

    Attributes:
        y: Response, shape (n,)
        w: Exposure, shape (n,)
        x: Covariates, shape (n, p)
        names: Optional covariate names, length p
    """

    y: np.ndarray
    w: np.ndarray
    x: np.ndarray
    names: Optional[List[str]] = field(default=None)

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        w = np.asarray(self.w, dtype=float).ravel()
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if not (y.size == w.size == x.shape[0]):
            raise LengthMismatch(
                f"Inconsistent lengths: y={y.size}, w={w.size}, x rows={x.shape[0]}"
            )
        for label, arr in (("y", y), ("w", w), ("x", x)):
            if not np.all(np.isfinite(arr)):
                raise SchemaError(f"Non-finite values in {label}", column=label)
        if self.names is not None and len(self.names) != x.shape[1]:
            raise LengthMismatch(f"{len(self.names)} names for {x.shape[1]} covariates")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def p(self) -> int:
        return self.x.shape[1]

    def name(self, j: int) -> str:
        return self.names[j] if self.names is not None else f"X{j}"

    def with_response(self, y: np.ndarray) -> "Dataset":
        """Same exposure and covariates with a different response."""
        return replace(self, y=y)

    def take_rows(self, rows: Sequence[int]) -> "Dataset":
        rows = np.asarray(rows)
        return replace(self, y=self.y[rows], w=self.w[rows], x=self.x[rows])

    def standardized(self) -> "Dataset":
        """Copy with every covariate centered and scaled to unit variance; constant columns are only centered."""
        sd = self.x.std(axis=0)
        sd[sd == 0] = 1.0
        return replace(self, x=(self.x - self.x.mean(axis=0)) / sd)

    def to_frame(self, response: str = "y", exposure: str = "w") -> pd.DataFrame:
        columns = [self.name(j) for j in range(self.p)]
        frame = pd.DataFrame(self.x, columns=columns)
        frame.insert(0, exposure, self.w)
        frame.insert(0, response, self.y)
        return frame


def load_dataset_csv(
    path: Union[str, Path],
    response: str,
    exposure: str,
    covariates: Optional[Sequence[str]] = None,
) -> Dataset:
    """
    Read a dataset from a CSV file with a header row.

    Args:
        path: CSV path (UTF-8, '.' decimal separator)
        response: Response column name
        exposure: Exposure column name
        covariates: Covariate columns; defaults to every other column

    Returns:
        Dataset with covariate names taken from the header
    """
    try:
        frame = pd.read_csv(path, encoding="utf-8")
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise SchemaError(f"Unreadable CSV {path}: {e}") from e
    required = [response, exposure] + list(covariates or [])
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise MissingColumns(f"Missing columns in {path}: {', '.join(missing)}", columns=missing)

    if covariates is None:
        covariates = [c for c in frame.columns if c not in (response, exposure)]
    if not covariates:
        raise SchemaError(f"No covariate columns in {path}")

    used = [response, exposure] + list(covariates)
    numeric = frame[used].apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna() | ~np.isfinite(numeric.to_numpy(dtype=float))
    if bad.to_numpy().any():
        row, col = np.argwhere(bad.to_numpy())[0]
        column = used[col]
        raise SchemaError(
            f"Non-numeric or missing value {frame[column].iloc[row]!r} at row {row + 1}, column {column!r}",
            row=int(row) + 1,
            column=column,
        )

    logger.info(f"Loaded {len(frame)} rows, {len(covariates)} covariates from {path}")
    return Dataset(
        y=numeric[response].to_numpy(),
        w=numeric[exposure].to_numpy(),
        x=numeric[list(covariates)].to_numpy(),
        names=list(covariates),
    )
