"""Gain, risk, and the dominance-rectangle area objective for the mean-variance model.

All reported figures are in percent: gain(x) = 100 m'x and
risk(x) = 100 x'Vx.  The area objective is the product of the margins
between a portfolio's (risk, gain) pair and a reference point,

    area(x) = (gain(x) - gain_ref) * (risk_ref - risk(x)),

i.e. the area of the rectangle the portfolio dominates.  Evaluations are
deliberately unrestricted (no simplex membership is enforced) so that
finite-difference oracles and grid sweeps can probe arbitrary points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .market import MarketModel

__all__ = [
    "PERCENT",
    "REFERENCE_KINDS",
    "PortfolioWeights",
    "ReferencePoint",
    "ObjectivePair",
    "AreaProblem",
    "as_weight_array",
    "gain",
    "risk",
    "objective_pair",
    "area",
    "area_gradient",
    "dominant_eigenvalue",
    "gradient_lipschitz_bound",
]

PERCENT = 100.0

REFERENCE_KINDS = ("nadir", "worst", "custom")

# Componentwise nonnegativity slack and budget slack accepted for weights.
WEIGHT_NONNEG_TOL = 1e-12
WEIGHT_BUDGET_TOL = 1e-10


@dataclass(frozen=True)
class PortfolioWeights:
    """Point on the unit simplex: nonnegative weights summing to one."""

    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        if x.size < 1:
            raise ValueError("empty weight vector")
        if not np.isfinite(x).all():
            raise ValueError("weights contain non-finite entries")
        if x.min() < -WEIGHT_NONNEG_TOL:
            raise ValueError(f"negative weight {x.min():.3e} below tolerance")
        budget = x.sum()
        if abs(budget - 1.0) > WEIGHT_BUDGET_TOL:
            raise ValueError(f"weights sum to {budget!r}, expected 1")
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class ReferencePoint:
    """Reference (risk, gain) pair the dominance rectangle is anchored to.

    kind records how the point was built: "nadir" (per-objective worst
    over the efficient set), "worst" (worst over the whole simplex) or
    "custom".  Consistency with a concrete model is checked where the
    point is constructed, not here.
    """

    rho_ref: float
    gamma_ref: float
    kind: str = "custom"

    def __post_init__(self):
        if self.kind not in REFERENCE_KINDS:
            raise ValueError(f"kind must be one of {REFERENCE_KINDS}, got {self.kind!r}")
        if not (np.isfinite(self.rho_ref) and np.isfinite(self.gamma_ref)):
            raise ValueError("reference point must be finite")


@dataclass(frozen=True)
class ObjectivePair:
    """A portfolio's percent gain and percent risk."""

    gain: float
    risk: float

    def __post_init__(self):
        if not (np.isfinite(self.gain) and np.isfinite(self.risk)):
            raise ValueError("objective pair must be finite")


@dataclass(frozen=True)
class AreaProblem:
    """Market model plus reference point; the data of one selection problem."""

    model: MarketModel
    ref: ReferencePoint

    def gain(self, x) -> float:
        return gain(self.model, x)

    def risk(self, x) -> float:
        return risk(self.model, x)

    def objective_pair(self, x) -> ObjectivePair:
        return objective_pair(self.model, x)

    def area(self, x) -> float:
        return area(self, x)

    def area_gradient(self, x) -> np.ndarray:
        return area_gradient(self, x)

    def lipschitz_bound(self) -> float:
        return gradient_lipschitz_bound(self)


def as_weight_array(x, n: int | None = None) -> np.ndarray:
    """Coerce PortfolioWeights or array-like to a 1-D float vector."""
    if isinstance(x, PortfolioWeights):
        vec = x.x
    else:
        vec = np.asarray(x, dtype=float).reshape(-1)
    if n is not None and vec.shape[0] != n:
        raise ValueError(f"dimension mismatch: vector has {vec.shape[0]} entries, model has {n}")
    return vec


def gain(model, x) -> float:
    """Percent expected gain 100 m'x."""
    vec = as_weight_array(x, model.n)
    return PERCENT * float(model.mean @ vec)


def risk(model, x) -> float:
    """Percent variance risk 100 x'Vx."""
    vec = as_weight_array(x, model.n)
    return PERCENT * float(vec @ model.covariance @ vec)


def objective_pair(model, x) -> ObjectivePair:
    return ObjectivePair(gain=gain(model, x), risk=risk(model, x))


def area(problem: AreaProblem, x) -> float:
    """Rectangle area (gain - gain_ref) * (risk_ref - risk); negative outside the box."""
    vec = as_weight_array(x, problem.model.n)
    g = gain(problem.model, vec)
    r = risk(problem.model, vec)
    return (g - problem.ref.gamma_ref) * (problem.ref.rho_ref - r)


def area_gradient(problem: AreaProblem, x) -> np.ndarray:
    """Gradient of the area: (risk_ref - risk(x)) * 100 m - (gain(x) - gain_ref) * 200 Vx."""
    model = problem.model
    vec = as_weight_array(x, model.n)
    g = gain(model, vec)
    r = risk(model, vec)
    grad_gain = PERCENT * model.mean
    grad_risk = 2.0 * PERCENT * (model.covariance @ vec)
    return (problem.ref.rho_ref - r) * grad_gain - (g - problem.ref.gamma_ref) * grad_risk


def dominant_eigenvalue(matrix: np.ndarray, tol: float = 1e-10, max_iter: int = 10000) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    A full eigendecomposition is avoided on purpose: only this one scalar
    is needed by the stepsize bound.  The start vector carries a small
    index ramp so it cannot be orthogonal to the top eigenspace for the
    matrices seen in practice.
    """
    mat = np.asarray(matrix, dtype=float)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise ValueError("matrix contains non-finite entries")
    v = np.ones(n) + 1e-4 * np.arange(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = mat @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        lam_new = float(v @ (mat @ v))
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return max(lam_new, 0.0)
        lam = lam_new
    return max(lam, 0.0)


def gradient_lipschitz_bound(problem: AreaProblem) -> float:
    """Lipschitz constant for the area gradient over the constrained region.

    Composed from the moduli of the mean-variance pieces: the gain is
    linear so its gradient modulus vanishes (which drops the minimum-risk
    term entirely), the risk gradient modulus is 200 lambda_max(V), and
    the function moduli are bounded via ||x||_2 <= 1 on the simplex.
    """
    model = problem.model
    lam = dominant_eigenvalue(model.covariance)
    grad_risk_lip = 2.0 * PERCENT * lam
    risk_lip = 2.0 * PERCENT * lam
    gain_lip = PERCENT * float(np.linalg.norm(model.mean))
    gamma_max = PERCENT * float(model.mean.max())
    gain_span = gamma_max - problem.ref.gamma_ref
    # clamp float dust on degenerate-span problems; reject real violations
    if gain_span < -1e-9 * max(1.0, abs(gamma_max)):
        raise ValueError(
            f"reference gain {problem.ref.gamma_ref} exceeds the maximal gain {gamma_max}"
        )
    return grad_risk_lip * max(gain_span, 0.0) + 2.0 * risk_lip * gain_lip
