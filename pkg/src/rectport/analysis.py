"""Comparison metrics, the method sweep, and brute-force grid oracles.

beta_metrics measures how far a solution sits from the ideal values,
normalized by the ideal-to-reference spans.  improve_worsen quantifies
the trade a competitor makes against the area-optimal portfolio: the
factor by which it improves one objective and the factor by which the
other must worsen, both measured from the reference point.  The grid
oracles enumerate simplex lattices and exist purely as independent
checks for the optimizers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .baselines import (
    EpsilonConstraintSpec,
    IdealPoint,
    epsilon_constraint_solve,
    ideal_point,
    max_gain_portfolio,
    min_variance_portfolio,
    reference_point,
)
from .market import MarketModel
from .objectives import (
    PERCENT,
    AreaProblem,
    ObjectivePair,
    PortfolioWeights,
    ReferencePoint,
    as_weight_array,
    objective_pair,
)
from .solver import (
    STATUS_CONVERGED,
    STATUS_DEGENERATE,
    ConvergenceError,
    SolverConfig,
    SolverResult,
    solve,
)

__all__ = [
    "DEFAULT_ALPHAS",
    "ReportRow",
    "Frontier",
    "beta_metrics",
    "improve_worsen",
    "active_positions",
    "run_sweep",
    "simplex_grid",
    "grid_oracle_max_area",
    "grid_oracle_dominates",
    "grid_oracle_min_risk",
]

DEFAULT_ALPHAS = (0.01, 0.25, 0.5, 0.75, 0.99)
ACTIVE_THRESHOLD = 1e-3
DOMINANCE_MARGIN = 1e-6
GRID_FEASIBILITY_TOL = 1e-9
MAX_GRID_DIM = 4


@dataclass(frozen=True)
class ReportRow:
    """One method's outcome in the comparison report.

    Solutions always land between the ideal and reference values, so the
    normalized distances must fall in [0, 1]; competitors can never
    improve on the area optimum by more than they worsen.  Both facts
    are enforced here (with float slack) so a malformed sweep fails
    loudly instead of printing nonsense.
    """

    method: str
    gain: float
    risk: float
    area_value: float
    beta1: float
    beta2: float
    beta_norm: float
    improve_factor: float
    worsen_factor: float
    improved_objective: str
    active_positions: int
    weights: PortfolioWeights | None = None

    def __post_init__(self):
        for name, value in (("beta1", self.beta1), ("beta2", self.beta2)):
            if not -1e-9 <= value <= 1.0 + 1e-9:
                raise ValueError(f"{name}={value} outside [0, 1]")
        if self.method != "area" and self.improve_factor > self.worsen_factor + 1e-9:
            raise ValueError(
                f"improvement {self.improve_factor} exceeds worsening {self.worsen_factor}"
            )


@dataclass(frozen=True)
class Frontier:
    """Report rows plus the ideal and reference points they were scored against."""

    rows: tuple[ReportRow, ...]
    ideal: IdealPoint
    ref: ReferencePoint
    degenerate: bool = False

    def __post_init__(self):
        if not self.degenerate:
            n_area = sum(1 for row in self.rows if row.method == "area")
            if n_area != 1:
                raise ValueError(f"expected exactly one area row, found {n_area}")


def beta_metrics(ideal: IdealPoint, ref: ReferencePoint, pair: ObjectivePair) -> tuple[float, float, float]:
    """Normalized distances of a (gain, risk) pair from the ideal values.

    beta1 = (gamma_max - gain) / (gamma_max - gamma_ref),
    beta2 = (risk - rho_min) / (rho_ref - rho_min), plus their 2-norm.
    """
    gain_span = ideal.gamma_max - ref.gamma_ref
    risk_span = ref.rho_ref - ideal.rho_min
    if gain_span <= 0.0 or risk_span <= 0.0:
        raise ValueError(
            f"degenerate spans (gain {gain_span}, risk {risk_span}); "
            "the market offers no trade-off to normalize against"
        )
    beta1 = (ideal.gamma_max - pair.gain) / gain_span
    beta2 = (pair.risk - ideal.rho_min) / risk_span
    return beta1, beta2, math.hypot(beta1, beta2)


def improve_worsen(
    ref: ReferencePoint,
    pair_area: ObjectivePair,
    pair_x: ObjectivePair,
) -> tuple[float, float, str]:
    """Improvement and worsening factors of pair_x against the area optimum.

    Both factors are ratios of reference margins.  Whichever objective is
    strictly better at x than at the area solution is the improved one;
    equal pairs yield (1, 1, "none").  A worsening denominator of zero
    (x attains a reference value exactly) yields an infinite factor.
    """
    gain_margin_area = pair_area.gain - ref.gamma_ref
    risk_margin_area = ref.rho_ref - pair_area.risk
    if gain_margin_area <= 0.0 or risk_margin_area <= 0.0:
        raise ValueError("area solution must sit strictly inside the reference box")
    if pair_x.gain > pair_area.gain:
        improve = (pair_x.gain - ref.gamma_ref) / gain_margin_area
        denom = ref.rho_ref - pair_x.risk
        worsen = risk_margin_area / denom if denom > 0.0 else float("inf")
        return improve, worsen, "gain"
    if pair_x.risk < pair_area.risk:
        improve = (ref.rho_ref - pair_x.risk) / risk_margin_area
        denom = pair_x.gain - ref.gamma_ref
        worsen = gain_margin_area / denom if denom > 0.0 else float("inf")
        return improve, worsen, "risk"
    return 1.0, 1.0, "none"


def active_positions(x, threshold: float = ACTIVE_THRESHOLD) -> int:
    """Number of weights at or above threshold."""
    vec = as_weight_array(x)
    return int(np.count_nonzero(vec >= threshold))


def _build_row(
    method: str,
    model: MarketModel,
    ideal: IdealPoint,
    ref: ReferencePoint,
    pair_area: ObjectivePair,
    x: PortfolioWeights,
    threshold: float,
) -> ReportRow:
    pair = objective_pair(model, x)
    area_value = (pair.gain - ref.gamma_ref) * (ref.rho_ref - pair.risk)
    beta1, beta2, beta_norm = beta_metrics(ideal, ref, pair)
    if method == "area":
        improve, worsen, which = 1.0, 1.0, "none"
    else:
        improve, worsen, which = improve_worsen(ref, pair_area, pair)
    return ReportRow(
        method=method,
        gain=pair.gain,
        risk=pair.risk,
        area_value=area_value,
        beta1=beta1,
        beta2=beta2,
        beta_norm=beta_norm,
        improve_factor=improve,
        worsen_factor=worsen,
        improved_objective=which,
        active_positions=active_positions(x, threshold),
        weights=x,
    )


def run_sweep(
    model: MarketModel,
    kind: str = "nadir",
    alphas=DEFAULT_ALPHAS,
    solver_config: SolverConfig | None = None,
    active_threshold: float = ACTIVE_THRESHOLD,
) -> tuple[Frontier, SolverResult]:
    """Full comparison: one area row plus one gain-floor row per alpha.

    Returns the frontier and the raw solver result (the latter carries
    iteration counts and timing for reporting).  A degenerate market
    yields an empty frontier with the degenerate flag set.
    """
    alphas = tuple(sorted(float(a) for a in alphas))
    for a in alphas:
        if not 0.0 <= a <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {a}")
    x_mv = min_variance_portfolio(model)
    x_mg = max_gain_portfolio(model)
    ideal = ideal_point(model, x_mv)
    ref = reference_point(model, kind, x_min_var=x_mv, x_max_gain=x_mg)
    problem = AreaProblem(model=model, ref=ref)

    result = solve(problem, solver_config)
    if result.status == STATUS_DEGENERATE:
        return Frontier(rows=(), ideal=ideal, ref=ref, degenerate=True), result
    if result.status != STATUS_CONVERGED:
        raise ConvergenceError(
            f"area solver stopped at status {result.status!r} after {result.iterations} iterations"
        )

    pair_area = result.objective_pair
    rows = [_build_row("area", model, ideal, ref, pair_area, result.x, active_threshold)]
    for alpha in alphas:
        spec = EpsilonConstraintSpec.from_alpha(alpha, ideal, ref)
        x_eps = epsilon_constraint_solve(model, spec)
        rows.append(
            _build_row(f"eps({alpha:g})", model, ideal, ref, pair_area, x_eps, active_threshold)
        )
    return Frontier(rows=tuple(rows), ideal=ideal, ref=ref), result


def simplex_grid(n: int, step: float) -> np.ndarray:
    """All simplex points with coordinates in multiples of step, in lexicographic order."""
    if not 1 <= n <= MAX_GRID_DIM:
        raise ValueError(f"grid enumeration supports up to {MAX_GRID_DIM} assets, got {n}")
    if not 0.0 < step <= 1.0:
        raise ValueError(f"step must lie in (0, 1], got {step}")
    k = int(round(1.0 / step))
    counts = []
    if n == 1:
        counts = [(k,)]
    elif n == 2:
        counts = [(i, k - i) for i in range(k + 1)]
    elif n == 3:
        counts = [(i, j, k - i - j) for i in range(k + 1) for j in range(k - i + 1)]
    else:
        counts = [
            (i, j, l, k - i - j - l)
            for i in range(k + 1)
            for j in range(k - i + 1)
            for l in range(k - i - j + 1)
        ]
    return np.array(counts, dtype=float) / k


def _grid_objectives(model: MarketModel, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gains = PERCENT * (points @ model.mean)
    risks = PERCENT * np.einsum("ij,jk,ik->i", points, model.covariance, points)
    return gains, risks


def grid_oracle_max_area(problem: AreaProblem, step: float) -> tuple[PortfolioWeights, float]:
    """Brute-force area maximizer over the simplex lattice, restricted to the
    reference box (same feasibility tolerance as the solver); ties go to the
    lexicographically first point."""
    points = simplex_grid(problem.model.n, step)
    gains, risks = _grid_objectives(problem.model, points)
    feasible = (gains >= problem.ref.gamma_ref - GRID_FEASIBILITY_TOL) & (
        risks <= problem.ref.rho_ref + GRID_FEASIBILITY_TOL
    )
    if not feasible.any():
        raise ValueError("no lattice point lies in the reference box; refine the step")
    areas = (gains - problem.ref.gamma_ref) * (problem.ref.rho_ref - risks)
    areas[~feasible] = -np.inf
    best = int(np.argmax(areas))
    return PortfolioWeights(points[best]), float(areas[best])


def grid_oracle_dominates(problem: AreaProblem, pair: ObjectivePair, step: float) -> bool:
    """True when some lattice portfolio weakly dominates the pair with at
    least one margin above the dominance threshold."""
    points = simplex_grid(problem.model.n, step)
    gains, risks = _grid_objectives(problem.model, points)
    gain_margin = gains - pair.gain
    risk_margin = pair.risk - risks
    weak = (gain_margin >= 0.0) & (risk_margin >= 0.0)
    strong = weak & ((gain_margin > DOMINANCE_MARGIN) | (risk_margin > DOMINANCE_MARGIN))
    return bool(strong.any())


def _local_lattice(center: np.ndarray, step: float, span: int) -> np.ndarray:
    """Zero-sum offsets around center, step-spaced, span cells each way in the
    free coordinates; points leaving the nonnegative orthant are dropped."""
    n = center.shape[0]
    offsets = [np.arange(-span, span + 1) * step for _ in range(n - 1)]
    mesh = np.meshgrid(*offsets, indexing="ij")
    free = np.stack([m.ravel() for m in mesh], axis=1)
    deltas = np.hstack([free, -free.sum(axis=1, keepdims=True)])
    points = center + deltas
    keep = (points >= 0.0).all(axis=1)
    return points[keep]


def _floor_face_points(model: MarketModel, gain_floor: float) -> np.ndarray:
    """Intersections of the plane {100 m'x = floor} with the simplex edges."""
    n = model.n
    m = model.mean
    target = gain_floor / PERCENT
    points = []
    for i in range(n):
        for j in range(i + 1, n):
            if m[i] == m[j]:
                continue
            t = (target - m[i]) / (m[j] - m[i])
            if -1e-12 <= t <= 1.0 + 1e-12:
                x = np.zeros(n)
                x[i], x[j] = 1.0 - t, t
                points.append(np.clip(x, 0.0, None))
    return np.array(points) if points else np.empty((0, n))


def _scan_segment(
    model: MarketModel, a: np.ndarray, b: np.ndarray, samples: int, refine_levels: int
) -> tuple[np.ndarray, float]:
    """Dense 1-D risk scan of the segment [a, b], refined around the incumbent."""
    lo, hi = 0.0, 1.0
    best_t, best_r = 0.0, np.inf
    for _ in range(refine_levels + 1):
        ts = np.linspace(lo, hi, samples)
        points = np.outer(1.0 - ts, a) + np.outer(ts, b)
        _, risks = _grid_objectives(model, points)
        k = int(np.argmin(risks))
        if risks[k] < best_r:
            best_t, best_r = float(ts[k]), float(risks[k])
        width = (hi - lo) / samples
        lo, hi = max(0.0, best_t - 2 * width), min(1.0, best_t + 2 * width)
    x = (1.0 - best_t) * a + best_t * b
    return x, best_r


def grid_oracle_min_risk(
    model: MarketModel,
    gain_floor: float,
    step: float = 0.005,
    samples: int = 2001,
    refine_levels: int = 3,
) -> tuple[PortfolioWeights, float]:
    """Brute-force least risk subject to a percent gain floor (n <= 3).

    Two enumeration passes cover the two KKT cases.  A full simplex
    lattice handles an inactive gain constraint (plus local refinement
    around the incumbent, valid because the risk is convex).  When the
    constraint binds the minimizer lies on the floor face, a point (n=2)
    or segment (n=3) whose endpoints sit on simplex edges; that face is
    parametrized exactly and scanned densely with 1-D refinement, which a
    lattice cannot do since its offsets never align with the face.
    """
    if model.n > 3:
        raise ValueError("the constrained oracle supports up to 3 assets")
    points = simplex_grid(model.n, step)
    gains, risks = _grid_objectives(model, points)
    feasible = gains >= gain_floor - GRID_FEASIBILITY_TOL
    if not feasible.any():
        raise ValueError(f"no lattice point reaches the gain floor {gain_floor}")
    masked = np.where(feasible, risks, np.inf)
    best = int(np.argmin(masked))
    x_best, r_best = points[best], float(masked[best])

    spacing = step
    for _ in range(refine_levels):
        spacing /= 5.0
        local = _local_lattice(x_best, spacing, span=10)
        gains_l, risks_l = _grid_objectives(model, local)
        feasible_l = gains_l >= gain_floor - GRID_FEASIBILITY_TOL
        if feasible_l.any():
            masked_l = np.where(feasible_l, risks_l, np.inf)
            cand = int(np.argmin(masked_l))
            if masked_l[cand] < r_best:
                x_best, r_best = local[cand], float(masked_l[cand])

    face = _floor_face_points(model, gain_floor)
    if face.shape[0] == 1:
        _, r_face = _grid_objectives(model, face)
        if r_face[0] < r_best:
            x_best, r_best = face[0], float(r_face[0])
    elif face.shape[0] >= 2:
        for i in range(face.shape[0]):
            for j in range(i + 1, face.shape[0]):
                x_seg, r_seg = _scan_segment(model, face[i], face[j], samples, refine_levels)
                if r_seg < r_best:
                    x_best, r_best = x_seg, r_seg
    return PortfolioWeights(x_best), r_best
