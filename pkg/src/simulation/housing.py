"""Boston-Housing ingestion and augmentation with artificial predictors."""

import logging
from pathlib import Path
from typing import List, Union

import numpy as np
import pandas as pd

from ..errors import InvalidSpec, MissingColumns, SchemaError
from ..screening.dataset import Dataset

logger = logging.getLogger(__name__)

HOUSING_COLUMNS = [
    "MV", "RM", "AGE", "DIS", "RAD", "TAX", "PTRATIO", "B", "LSTAT",
    "CRIM", "ZN", "INDUS", "CHAS", "NOX",
]

# Covariates of the common hedonic specification; log(DIS) is the exposure.
COVARIATE_NAMES: List[str] = [
    "RM2", "AGE", "logRAD", "TAX", "PTRATIO", "B063sq", "logLSTAT",
    "CRIM", "ZN", "INDUS", "CHAS", "NOX2",
]


def load_housing_csv(path: Union[str, Path], standardize: bool = True) -> Dataset:
    """
    Read the housing CSV and apply the hedonic-model transforms.

    Response log(MV), exposure log(DIS), covariates RM^2, AGE, log(RAD), TAX,
    PTRATIO, (B - 0.63)^2, log(LSTAT), CRIM, ZN, INDUS, CHAS, NOX^2.

    Args:
        path: CSV with at least HOUSING_COLUMNS (extra columns are ignored)
        standardize: Scale covariates to unit variance

    Returns:
        Dataset with 12 named covariates
    """
    try:
        frame = pd.read_csv(path, encoding="utf-8")
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise SchemaError(f"Unreadable CSV {path}: {e}") from e
    missing = [c for c in HOUSING_COLUMNS if c not in frame.columns]
    if missing:
        raise MissingColumns(f"Housing CSV {path} lacks columns: {', '.join(missing)}", columns=missing)

    data = frame[HOUSING_COLUMNS].apply(pd.to_numeric, errors="coerce")
    if data.isna().to_numpy().any():
        row, col = np.argwhere(data.isna().to_numpy())[0]
        raise SchemaError(
            f"Non-numeric value at row {row + 1}, column {HOUSING_COLUMNS[col]!r}",
            row=int(row) + 1,
            column=HOUSING_COLUMNS[col],
        )
    for column in ("MV", "DIS", "RAD", "LSTAT"):
        if (data[column] <= 0).any():
            raise SchemaError(f"Column {column!r} must be positive for the log transform", column=column)

    x = np.column_stack([
        data["RM"] ** 2,
        data["AGE"],
        np.log(data["RAD"]),
        data["TAX"],
        data["PTRATIO"],
        (data["B"] - 0.63) ** 2,
        np.log(data["LSTAT"]),
        data["CRIM"],
        data["ZN"],
        data["INDUS"],
        data["CHAS"],
        data["NOX"] ** 2,
    ])
    dataset = Dataset(
        y=np.log(data["MV"].to_numpy()),
        w=np.log(data["DIS"].to_numpy()),
        x=x,
        names=list(COVARIATE_NAMES),
    )
    logger.info(f"Loaded housing data: {dataset.n} tracts")
    return dataset.standardized() if standardize else dataset


def augment_housing(raw: Dataset, p: int, t: float, seed: int) -> Dataset:
    """
    Append artificial predictors X_j = (Z_j + t U) / (1 + t), j = s+1..p.

    Z_j are iid standard normal and one uniform U per row is shared by all
    appended columns.

    Args:
        raw: Dataset with the s original covariates
        p: Total number of covariates after augmentation
        t: Correlation control
        seed: RNG seed

    Returns:
        Dataset with p covariates; the first s are the originals
    """
    s = raw.p
    if p < s:
        raise InvalidSpec(f"p={p} is below the {s} original covariates")
    if p == s:
        return raw

    rng = np.random.default_rng(seed)
    z = rng.standard_normal((raw.n, p - s))
    u = rng.uniform(size=(raw.n, 1))
    extra = (z + t * u) / (1.0 + t)
    names = [raw.name(j) for j in range(s)] + [f"Z{j + 1}" for j in range(s, p)]
    return Dataset(y=raw.y, w=raw.w, x=np.hstack([raw.x, extra]), names=names)
