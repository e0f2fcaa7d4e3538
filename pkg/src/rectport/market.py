"""Loading of asset-return time series and estimation of the mean/covariance market model.

Input data are per-period simple returns stored as decimal fractions
(0.012 means +1.2% over the period).  The estimated model keeps the raw
mean vector and covariance matrix; the percent scaling used by all
reported gain/risk figures lives in the objective evaluations, not here.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "CsvFormatError",
    "ReturnsMatrix",
    "MarketModel",
    "load_returns",
    "estimate_model",
]

# Absolute symmetry tolerance accepted before construction fails.
SYMMETRY_TOL = 1e-12
# Relative floor on the smallest covariance eigenvalue (scaled by trace/n).
PSD_TOL = 1e-10


class CsvFormatError(ValueError):
    """Raised when a returns CSV cannot be parsed into a valid ReturnsMatrix."""


@dataclass(frozen=True)
class ReturnsMatrix:
    """T x n matrix of per-period simple returns plus asset labels.

    Invariants enforced on construction: at least two periods and two
    assets, all entries finite and strictly greater than -1, labels
    pairwise distinct and matching the column count.
    """

    values: np.ndarray
    asset_labels: tuple[str, ...]
    period_label: str = "period"

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        labels = tuple(str(lab) for lab in self.asset_labels)
        if values.ndim != 2:
            raise ValueError(f"returns must be a 2-D array, got ndim={values.ndim}")
        t, n = values.shape
        if t < 2:
            raise ValueError(f"need at least 2 periods, got {t}")
        if n < 2:
            raise ValueError(f"need at least 2 assets, got {n}")
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for {n} columns")
        if len(set(labels)) != n:
            raise ValueError("asset labels must be pairwise distinct")
        if not np.isfinite(values).all():
            bad = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(
                f"non-finite return at data row {bad[0] + 1}, column '{labels[bad[1]]}'"
            )
        if (values <= -1.0).any():
            bad = np.argwhere(values <= -1.0)[0]
            raise ValueError(
                f"return <= -100% at data row {bad[0] + 1}, column '{labels[bad[1]]}'"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "asset_labels", labels)

    @property
    def n_periods(self) -> int:
        return self.values.shape[0]

    @property
    def n_assets(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class MarketModel:
    """Raw mean vector and covariance matrix of asset returns.

    The covariance is symmetrized on construction and must be positive
    semidefinite up to a small eigenvalue tolerance.
    """

    mean: np.ndarray
    covariance: np.ndarray
    asset_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.covariance, dtype=float)
        n = mean.shape[0]
        if n < 1:
            raise ValueError("mean vector is empty")
        if cov.shape != (n, n):
            raise ValueError(f"covariance shape {cov.shape} does not match {n} assets")
        if not np.isfinite(mean).all() or not np.isfinite(cov).all():
            raise ValueError("model contains non-finite entries")
        asym = np.abs(cov - cov.T).max() if n else 0.0
        if asym > SYMMETRY_TOL:
            raise ValueError(f"covariance asymmetry {asym:.3e} exceeds {SYMMETRY_TOL:.0e}")
        cov = 0.5 * (cov + cov.T)
        eigenvalues = np.linalg.eigvalsh(cov)
        floor = -PSD_TOL * (np.trace(cov) / n)
        if eigenvalues[0] < floor:
            raise ValueError(
                f"covariance not positive semidefinite: min eigenvalue {eigenvalues[0]:.3e}"
            )
        labels = self.asset_labels
        if labels is not None:
            labels = tuple(str(lab) for lab in labels)
            if len(labels) != n:
                raise ValueError(f"{len(labels)} labels for {n} assets")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "asset_labels", labels)

    @property
    def n(self) -> int:
        return self.mean.shape[0]

    def labels(self) -> tuple[str, ...]:
        if self.asset_labels is not None:
            return self.asset_labels
        return tuple(f"asset{i + 1}" for i in range(self.n))


def _read_text(source) -> str:
    if hasattr(source, "read"):
        data = source.read()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    else:
        data = Path(source).read_bytes()
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CsvFormatError(f"input is not valid UTF-8: {exc}") from None
    return data


def load_returns(source, date_column: bool = False, period_label: str = "period") -> ReturnsMatrix:
    """Parse a returns CSV into a ReturnsMatrix.

    Parameters
    ----------
    source:
        Path, bytes, or a readable file object.  The file must be UTF-8
        CSV with one header row of asset labels followed by one row of
        decimal-fraction returns per period.
    date_column:
        When true, the first column holds period dates and is dropped.
    period_label:
        Free-form description of the sampling period (e.g. "weekly").

    Raises
    ------
    CsvFormatError
        On malformed CSV, non-numeric cells, inconsistent row widths,
        fewer than two data rows, or returns at or below -100%.  The
        message names the offending row and column.
    """
    text = _read_text(source)
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise CsvFormatError("empty input: no header row found")

    header = [cell.strip() for cell in rows[0]]
    data_rows = rows[1:]
    if date_column:
        if len(header) < 2:
            raise CsvFormatError("date_column set but the file has fewer than 2 columns")
        header = header[1:]
        data_rows = [row[1:] for row in data_rows]

    labels = tuple(header)
    n = len(labels)
    if n < 2:
        raise CsvFormatError(f"need at least 2 asset columns, found {n}")
    if len(set(labels)) != n:
        dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
        raise CsvFormatError(f"duplicate asset labels in header: {dupes}")
    if any(not lab for lab in labels):
        raise CsvFormatError("blank asset label in header")

    values = np.empty((len(data_rows), n), dtype=float)
    for r, row in enumerate(data_rows, start=1):
        if len(row) != n:
            raise CsvFormatError(
                f"data row {r} has {len(row)} columns, header has {n}"
            )
        for c, cell in enumerate(row):
            try:
                v = float(cell.strip())
            except ValueError:
                raise CsvFormatError(
                    f"non-numeric value '{cell.strip()}' at data row {r}, column '{labels[c]}'"
                ) from None
            if not np.isfinite(v):
                raise CsvFormatError(
                    f"non-finite value at data row {r}, column '{labels[c]}'"
                )
            if v <= -1.0:
                raise CsvFormatError(
                    f"return <= -100% ({v}) at data row {r}, column '{labels[c]}'"
                )
            values[r - 1, c] = v

    if values.shape[0] < 2:
        raise CsvFormatError(f"need at least 2 data rows, found {values.shape[0]}")
    return ReturnsMatrix(values=values, asset_labels=labels, period_label=period_label)


def estimate_model(returns: ReturnsMatrix) -> MarketModel:
    """Estimate the market model: column means and the unbiased (T-1) sample covariance."""
    values = returns.values
    t = values.shape[0]
    if t < 2:
        raise ValueError("covariance undefined for fewer than 2 periods")
    mean = values.mean(axis=0)
    centered = values - mean
    cov = centered.T @ centered / (t - 1)
    cov = 0.5 * (cov + cov.T)
    return MarketModel(mean=mean, covariance=cov, asset_labels=returns.asset_labels)
