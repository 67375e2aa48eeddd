"""CSV ingestion and writing for regression sequences.

Files are comma-separated UTF-8 with '.' decimals. The response is one
column (default: the first); every other column is a predictor, in file
order. An intercept flag prepends a constant-1 column.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .model import Dataset

__all__ = ["DataError", "load_csv", "save_csv"]


class DataError(ValueError):
    """Malformed or unusable input data."""


def load_csv(
    path: str | Path,
    *,
    has_header: bool = False,
    response_column: int = 0,
    intercept: bool = False,
) -> Dataset:
    """Read a Dataset from a CSV file.

    response_column is 0-based after header removal. With a single column
    the file is a bare response and intercept=True is required.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    start_line = 1
    if has_header and rows:
        rows = rows[1:]
        start_line = 2
    rows = [(i + start_line, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: no observations")

    width = len(rows[0][1])
    if not 0 <= response_column < width:
        raise DataError(
            f"{path}: response column {response_column} outside 0..{width - 1}"
        )
    if width == 1 and not intercept:
        raise DataError(
            f"{path}: single-column file needs the intercept flag to form predictors"
        )

    y = np.empty(len(rows))
    x = np.empty((len(rows), width - 1))
    for k, (lineno, row) in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"{path}:{lineno}: expected {width} fields, got {len(row)}"
            )
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: non-numeric cell ({exc})") from exc
        y[k] = vals[response_column]
        x[k] = vals[:response_column] + vals[response_column + 1 :]

    if intercept:
        x = np.hstack([np.ones((len(rows), 1)), x])
    try:
        return Dataset(x=x, y=y)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


def save_csv(data: Dataset, path: str | Path, *, header: bool = True) -> None:
    """Write response-first CSV (column order: y, x1, ..., xq)."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow(["y", *(f"x{j + 1}" for j in range(data.q))])
        for yi, xi in zip(data.y, data.x):
            writer.writerow([repr(float(yi)), *(repr(float(v)) for v in xi)])
