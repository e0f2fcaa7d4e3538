"""Euclidean projection onto the unit simplex and feasibility predicates.

The projection uses the classic sort-and-threshold scheme (see e.g.
arXiv:1101.6081): sort descending, locate the largest prefix whose
running mean keeps the shifted entries positive, subtract that threshold
and clip at zero.  O(n log n), exact up to floating point, and cheap
enough that projecting every gradient step is a non-issue.
"""

from __future__ import annotations

import numpy as np

from .objectives import AreaProblem, PortfolioWeights, as_weight_array, gain, risk

__all__ = ["project_simplex", "project_simplex_array", "is_feasible"]

DEFAULT_FEASIBILITY_TOL = 1e-9


def project_simplex_array(y: np.ndarray) -> np.ndarray:
    """Projection as a raw array; used by solver inner loops."""
    y = np.asarray(y, dtype=float).reshape(-1)
    if y.size < 1:
        raise ValueError("cannot project an empty vector")
    if not np.isfinite(y).all():
        raise ValueError("cannot project a vector with non-finite entries")
    u = np.sort(y, kind="stable")[::-1]
    css = np.cumsum(u)
    ks = np.arange(1, y.size + 1)
    # largest prefix length k with u_(k) > (sum of k largest - 1) / k
    positive = u - (css - 1.0) / ks > 0.0
    k = int(np.nonzero(positive)[0][-1])
    theta = (css[k] - 1.0) / (k + 1)
    return np.maximum(y - theta, 0.0)


def project_simplex(y) -> PortfolioWeights:
    """Euclidean projection of an arbitrary finite vector onto the unit simplex."""
    return PortfolioWeights(project_simplex_array(as_weight_array(y)))


def is_feasible(problem: AreaProblem, x, tol: float = DEFAULT_FEASIBILITY_TOL) -> bool:
    """True when x meets the reference bounds: gain above gain_ref and risk below risk_ref.

    tol is an absolute slack on both comparisons, so reference-attaining
    boundary portfolios (e.g. the max-gain vertex under a nadir
    reference) count as feasible.
    """
    g = gain(problem.model, x)
    r = risk(problem.model, x)
    return g >= problem.ref.gamma_ref - tol and r <= problem.ref.rho_ref + tol
