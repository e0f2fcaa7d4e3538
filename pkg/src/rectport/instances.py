"""Seeded synthetic market instances for tests and the gen-instance command.

Instances follow a small factor model with weekly-return magnitudes:
means of a few tenths of a percent, volatilities of one to a few
percent.  The idiosyncratic variance floor keeps the covariance well
conditioned, so the resulting problems are non-degenerate almost surely.
"""

from __future__ import annotations

import numpy as np

from .market import MarketModel, ReturnsMatrix

__all__ = ["random_model", "random_returns", "returns_to_csv"]

DEFAULT_PERIODS = 120
N_FACTORS = 3


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_model(n: int, seed) -> MarketModel:
    """Factor-structured PSD covariance and a positive mean vector."""
    if n < 2:
        raise ValueError(f"need at least 2 assets, got {n}")
    rng = _rng(seed)
    k = min(N_FACTORS, n)
    loadings = rng.normal(0.0, 1.0, size=(n, k)) * rng.uniform(0.004, 0.015, size=(n, 1))
    idio = rng.uniform(0.005, 0.02, size=n)
    cov = loadings @ loadings.T + np.diag(idio**2)
    cov = 0.5 * (cov + cov.T)
    mean = rng.uniform(0.0005, 0.004, size=n)
    return MarketModel(mean=mean, covariance=cov)


def random_returns(n: int, periods: int = DEFAULT_PERIODS, seed=None) -> ReturnsMatrix:
    """Simulated per-period simple returns with the same factor structure."""
    if periods < 2:
        raise ValueError(f"need at least 2 periods, got {periods}")
    rng = _rng(seed)
    k = min(N_FACTORS, n)
    loadings = rng.normal(0.0, 1.0, size=(n, k)) * rng.uniform(0.004, 0.015, size=(n, 1))
    idio = rng.uniform(0.005, 0.02, size=n)
    mean = rng.uniform(0.0005, 0.004, size=n)
    factors = rng.normal(0.0, 1.0, size=(periods, k))
    noise = rng.normal(0.0, 1.0, size=(periods, n)) * idio
    values = mean + factors @ loadings.T + noise
    labels = tuple(f"A{i + 1:02d}" for i in range(n))
    return ReturnsMatrix(values=values, asset_labels=labels, period_label="synthetic")


def returns_to_csv(returns: ReturnsMatrix) -> str:
    """Render a ReturnsMatrix in the CSV layout the loader expects."""
    lines = [",".join(returns.asset_labels)]
    for row in returns.values:
        lines.append(",".join(f"{v:.10f}" for v in row))
    return "\n".join(lines) + "\n"
