"""rectport: bi-objective portfolio selection by dominance-rectangle area.

Selects, among all long-only fully-invested portfolios, the one
maximizing the area of the rectangle spanned between a reference
(risk, gain) point and the portfolio's own objective pair, via a
projected-gradient method on the simplex, and compares it against a
gain-floor scalarization sweep.
"""

from .analysis import (
    DEFAULT_ALPHAS,
    Frontier,
    ReportRow,
    active_positions,
    beta_metrics,
    grid_oracle_dominates,
    grid_oracle_max_area,
    grid_oracle_min_risk,
    improve_worsen,
    run_sweep,
    simplex_grid,
)
from .baselines import (
    EpsilonConstraintSpec,
    IdealPoint,
    area_problem,
    epsilon_constraint_solve,
    ideal_point,
    max_gain_portfolio,
    min_variance_portfolio,
    reference_point,
)
from .instances import random_model, random_returns, returns_to_csv
from .market import CsvFormatError, MarketModel, ReturnsMatrix, estimate_model, load_returns
from .objectives import (
    AreaProblem,
    ObjectivePair,
    PortfolioWeights,
    ReferencePoint,
    area,
    area_gradient,
    dominant_eigenvalue,
    gain,
    gradient_lipschitz_bound,
    objective_pair,
    risk,
)
from .simplex import is_feasible, project_simplex, project_simplex_array
from .solver import (
    ConvergenceError,
    DegenerateMarketError,
    SolverConfig,
    SolverResult,
    solve,
    starting_point,
    stationarity_residual,
)

__version__ = "0.1.0"

__all__ = [
    "AreaProblem",
    "ConvergenceError",
    "CsvFormatError",
    "DEFAULT_ALPHAS",
    "DegenerateMarketError",
    "EpsilonConstraintSpec",
    "Frontier",
    "IdealPoint",
    "MarketModel",
    "ObjectivePair",
    "PortfolioWeights",
    "ReferencePoint",
    "ReportRow",
    "ReturnsMatrix",
    "SolverConfig",
    "SolverResult",
    "active_positions",
    "area",
    "area_gradient",
    "area_problem",
    "beta_metrics",
    "dominant_eigenvalue",
    "epsilon_constraint_solve",
    "estimate_model",
    "gain",
    "gradient_lipschitz_bound",
    "grid_oracle_dominates",
    "grid_oracle_max_area",
    "grid_oracle_min_risk",
    "ideal_point",
    "improve_worsen",
    "is_feasible",
    "load_returns",
    "max_gain_portfolio",
    "min_variance_portfolio",
    "objective_pair",
    "project_simplex",
    "project_simplex_array",
    "random_model",
    "random_returns",
    "reference_point",
    "returns_to_csv",
    "risk",
    "run_sweep",
    "simplex_grid",
    "solve",
    "starting_point",
    "stationarity_residual",
]
