"""CSV ingestion, the price-to-return transform, and run records.

The return transform is r_t = (p_{t-1} - p_t) / p_{t-1} for t = 2..n, i.e.
positive when the price falls; this sign convention is kept deliberately.
Numbers are written with ``repr`` so a round trip through CSV reproduces
values bit for bit.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "DataIOError",
    "MissingColumnError",
    "CellParseError",
    "EmptySeriesError",
    "PriceSeries",
    "ReturnSeries",
    "to_returns",
    "load_price_csv",
    "write_series_csv",
    "load_series_csv",
    "write_result_record",
]


class DataIOError(Exception):
    """Base class for ingestion failures."""


class MissingColumnError(DataIOError):
    pass


class CellParseError(DataIOError):
    def __init__(self, path, line_no: int, text: str):
        super().__init__(f"{path}: line {line_no}: cannot parse {text!r} as a number")
        self.line_no = line_no


class EmptySeriesError(DataIOError):
    pass


@dataclass(frozen=True)
class PriceSeries:
    """Strictly positive prices, at least two of them."""

    name: str
    prices: np.ndarray
    timestamps: tuple[str, ...] | None = None

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        object.__setattr__(self, "prices", prices)
        if prices.size < 2:
            raise EmptySeriesError(f"price series {self.name!r} needs >= 2 points")
        bad = np.flatnonzero(~(prices > 0.0))
        if bad.size:
            raise ValueError(f"nonpositive price at index {int(bad[0])} in {self.name!r}")


@dataclass(frozen=True)
class ReturnSeries:
    name: str
    returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "returns", np.asarray(self.returns, dtype=float))


def to_returns(p: PriceSeries) -> ReturnSeries:
    """Transform prices to returns: r_t = (p_{t-1} - p_t) / p_{t-1}."""
    prev = p.prices[:-1]
    return ReturnSeries(name=p.name, returns=(prev - p.prices[1:]) / prev)


def load_price_csv(path, column: str) -> PriceSeries:
    """Parse one named column of a headered CSV into a price series.

    Distinct failures raise distinct errors: a missing file propagates
    ``FileNotFoundError``, an absent column :class:`MissingColumnError`, a
    non-numeric cell :class:`CellParseError` naming the line, and a file
    with no data rows :class:`EmptySeriesError`.
    """
    path = Path(path)
    values: list[float] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptySeriesError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if column not in header:
            raise MissingColumnError(f"{path}: no column {column!r} (have {header})")
        col = header.index(column)
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                values.append(float(row[col]))
            except (ValueError, IndexError):
                cell = row[col] if col < len(row) else "<missing>"
                raise CellParseError(path, line_no, cell) from None
    if not values:
        raise EmptySeriesError(f"{path}: empty series in column {column!r}")
    return PriceSeries(name=column, prices=np.array(values))


def write_series_csv(path, name: str, values) -> None:
    """One-column CSV with full-precision (repr) numeric text."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([name])
        for v in np.asarray(values, dtype=float):
            writer.writerow([repr(float(v))])


def load_series_csv(path, column: str) -> np.ndarray:
    """Read back a numeric column written by :func:`write_series_csv`."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if column not in header:
            raise MissingColumnError(f"{path}: no column {column!r}")
        col = header.index(column)
        return np.array([float(row[col]) for row in reader if row])


def write_result_record(path, record: dict) -> None:
    """Single-line JSON record with insertion key order (diffable)."""
    Path(path).write_text(json.dumps(record) + "\n")
