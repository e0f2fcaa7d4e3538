"""Convex reference subproblems: minimum variance, maximum gain, reference and
ideal points, and the gain-floor (epsilon-constraints) scalarization.

The quadratic subproblems are solved by plain projected gradient on the
simplex with the 1/L stepsize; the gain-floor problem wraps that kernel
in a bisection on the multiplier of the gain constraint.  Any convergent
convex method would do here; what the rest of the package relies on is
the fixed-point residual at the returned point, which is checked, not
assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .market import MarketModel
from .objectives import (
    PERCENT,
    AreaProblem,
    PortfolioWeights,
    ReferencePoint,
    dominant_eigenvalue,
    gain,
    risk,
)
from .simplex import project_simplex_array

__all__ = [
    "IdealPoint",
    "EpsilonConstraintSpec",
    "min_variance_portfolio",
    "max_gain_portfolio",
    "ideal_point",
    "reference_point",
    "area_problem",
    "epsilon_constraint_solve",
]

QP_RESIDUAL_TOL = 1e-9
QP_MAX_ITER = 1_000_000
GAIN_FLOOR_TOL = 1e-6
MULTIPLIER_CAP = 1e12
BRACKET_WIDTH_TOL = 1e-14


@dataclass(frozen=True)
class IdealPoint:
    """Componentwise best percent values: minimum risk and maximum gain."""

    rho_min: float
    gamma_max: float

    def __post_init__(self):
        if self.rho_min < 0.0:
            raise ValueError(f"minimum risk cannot be negative, got {self.rho_min}")


@dataclass(frozen=True)
class EpsilonConstraintSpec:
    """One gain floor of the scalarization sweep: alpha interpolates the
    floor between the reference gain (alpha=0) and the maximal gain (alpha=1)."""

    alpha: float
    gain_floor: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")

    @classmethod
    def from_alpha(cls, alpha: float, ideal: IdealPoint, ref: ReferencePoint) -> "EpsilonConstraintSpec":
        floor = alpha * (ideal.gamma_max - ref.gamma_ref) + ref.gamma_ref
        lo = min(ref.gamma_ref, ideal.gamma_max) - 1e-12
        hi = max(ref.gamma_ref, ideal.gamma_max) + 1e-12
        if not lo <= floor <= hi:
            raise ValueError(f"gain floor {floor} outside [{ref.gamma_ref}, {ideal.gamma_max}]")
        return cls(alpha=alpha, gain_floor=floor)


def _uniform(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def _quadratic_argmin(
    cov: np.ndarray,
    linear: np.ndarray,
    x0: np.ndarray,
    tol: float = QP_RESIDUAL_TOL,
    max_iter: int = QP_MAX_ITER,
    lam_max: float | None = None,
) -> np.ndarray:
    """min over the simplex of x'Vx + c'x by projected gradient, 1/L step.

    Stops when the infinity norm of one projected-gradient step falls to
    tol.  For a vanishing quadratic part the problem is linear and the
    minimizing vertex (or the uniform point, for a zero objective) is
    returned directly.
    """
    n = x0.shape[0]
    if lam_max is None:
        lam_max = dominant_eigenvalue(cov)
    if lam_max <= 0.0:
        if np.allclose(linear, linear[0]):
            return _uniform(n)
        unit = np.zeros(n)
        unit[int(np.argmin(linear))] = 1.0
        return unit
    step = 1.0 / (2.0 * lam_max)
    x = x0
    for _ in range(max_iter):
        grad = 2.0 * (cov @ x) + linear
        x_next = project_simplex_array(x - step * grad)
        if np.abs(x_next - x).max() <= tol:
            return x_next
        x = x_next
    raise RuntimeError(
        f"projected gradient did not reach residual {tol:.0e} within {max_iter} iterations"
    )


def min_variance_portfolio(model: MarketModel, tol: float = QP_RESIDUAL_TOL) -> PortfolioWeights:
    """Portfolio of least variance on the simplex.

    For a zero covariance the objective is flat and the uniform portfolio
    is returned for determinism.
    """
    x = _quadratic_argmin(model.covariance, np.zeros(model.n), _uniform(model.n), tol=tol)
    return PortfolioWeights(x)


def max_gain_portfolio(model: MarketModel) -> PortfolioWeights:
    """Vertex of maximal mean return; ties broken by smaller variance, then lower index."""
    m = model.mean
    best = np.flatnonzero(m == m.max())
    diag = np.diag(model.covariance)[best]
    i = int(best[int(np.argmin(diag))])
    x = np.zeros(model.n)
    x[i] = 1.0
    return PortfolioWeights(x)


def ideal_point(model: MarketModel, x_min_var: PortfolioWeights | None = None) -> IdealPoint:
    """Percent ideal values: risk of the min-variance portfolio, best single-asset gain."""
    if x_min_var is None:
        x_min_var = min_variance_portfolio(model)
    return IdealPoint(
        rho_min=risk(model, x_min_var),
        gamma_max=PERCENT * float(model.mean.max()),
    )


def reference_point(
    model: MarketModel,
    kind: str,
    x_min_var: PortfolioWeights | None = None,
    x_max_gain: PortfolioWeights | None = None,
) -> ReferencePoint:
    """Build the nadir or worst reference point for a model.

    nadir: risk of the max-gain portfolio and gain of the min-variance
    portfolio.  worst: componentwise worst values over the whole simplex,
    attained at vertices (the risk is convex, the gain linear).
    """
    if kind not in ("nadir", "worst"):
        raise ValueError(f"kind must be 'nadir' or 'worst', got {kind!r}")
    if x_min_var is None:
        x_min_var = min_variance_portfolio(model)
    if kind == "nadir":
        if x_max_gain is None:
            x_max_gain = max_gain_portfolio(model)
        ref = ReferencePoint(
            rho_ref=risk(model, x_max_gain),
            gamma_ref=gain(model, x_min_var),
            kind="nadir",
        )
    else:
        ref = ReferencePoint(
            rho_ref=PERCENT * float(np.diag(model.covariance).max()),
            gamma_ref=PERCENT * float(model.mean.min()),
            kind="worst",
        )
    ideal = ideal_point(model, x_min_var)
    slack = 1e-9
    if ref.rho_ref < ideal.rho_min - slack * max(1.0, abs(ideal.rho_min)):
        raise ValueError(f"reference risk {ref.rho_ref} below the minimum risk {ideal.rho_min}")
    if ref.gamma_ref > ideal.gamma_max + slack * max(1.0, abs(ideal.gamma_max)):
        raise ValueError(f"reference gain {ref.gamma_ref} above the maximal gain {ideal.gamma_max}")
    return ref


def area_problem(model: MarketModel, kind: str) -> AreaProblem:
    """Convenience constructor: model plus a freshly computed reference point."""
    return AreaProblem(model=model, ref=reference_point(model, kind))


def epsilon_constraint_solve(
    model: MarketModel,
    spec: EpsilonConstraintSpec,
    tol_gain: float = GAIN_FLOOR_TOL,
    inner_tol: float = QP_RESIDUAL_TOL,
) -> PortfolioWeights:
    """Least-variance portfolio whose percent gain is at least spec.gain_floor.

    Outer bisection on the multiplier of the gain constraint; each inner
    problem min x'Vx - lam m'x over the simplex reuses the projected
    gradient kernel, warm-started from the previous multiplier.  When the
    inner minimizer set is flat enough that no multiplier hits the floor
    exactly (singular covariance), the two bracket solutions are blended
    to land on the floor; the blend stays optimal because the minimizer
    set of the inner problem at the limit multiplier is convex.
    """
    floor = spec.gain_floor
    gamma_max = PERCENT * float(model.mean.max())
    if floor > gamma_max + tol_gain:
        raise ValueError(f"gain floor {floor} exceeds the maximal attainable gain {gamma_max}")

    cov = model.covariance
    m = model.mean
    lam_cov = dominant_eigenvalue(cov)

    def inner(lam: float, start: np.ndarray) -> np.ndarray:
        return _quadratic_argmin(cov, -lam * m, start, tol=inner_tol, lam_max=lam_cov)

    x = inner(0.0, _uniform(model.n))
    if gain(model, x) >= floor - tol_gain:
        return PortfolioWeights(x)

    lam_lo, x_lo = 0.0, x
    lam_hi = 1.0
    x_hi = inner(lam_hi, x_lo)
    while gain(model, x_hi) < floor:
        lam_hi *= 2.0
        if lam_hi > MULTIPLIER_CAP:
            raise RuntimeError(
                f"bisection bracket failure: multiplier {lam_hi:.3e} exceeded the cap "
                f"{MULTIPLIER_CAP:.0e} with gain {gain(model, x_hi)} < floor {floor}"
            )
        x_hi = inner(lam_hi, x_hi)

    while lam_hi - lam_lo > BRACKET_WIDTH_TOL:
        lam_mid = 0.5 * (lam_lo + lam_hi)
        x_mid = inner(lam_mid, x_hi)
        g_mid = gain(model, x_mid)
        if abs(g_mid - floor) <= tol_gain:
            return PortfolioWeights(x_mid)
        if g_mid < floor:
            lam_lo, x_lo = lam_mid, x_mid
        else:
            lam_hi, x_hi = lam_mid, x_mid

    g_lo = gain(model, x_lo)
    g_hi = gain(model, x_hi)
    if g_hi - g_lo <= 0.0:
        return PortfolioWeights(x_hi)
    t = min(max((floor - g_lo) / (g_hi - g_lo), 0.0), 1.0)
    return PortfolioWeights((1.0 - t) * x_lo + t * x_hi)
