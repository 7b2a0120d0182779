"""Relaxation Runge-Kutta methods for conserving or dissipating convex entropies."""

from relaxrk.integrator import (
    Classification,
    IntegrationError,
    OdeProblem,
    RelaxationConfig,
    RelaxationError,
    SolveTrace,
    StepAggregates,
    StepMode,
    StepOutput,
    integrate,
    residual,
    residual_derivative,
    rk_stages,
    solve_gamma,
    solve_gamma_multi,
    step,
)
from relaxrk.problems import PROBLEM_NAMES, ProblemCatalogEntry, get_problem
from relaxrk.rootfind import RootConfig, RootResult, bracket_root, find_root
from relaxrk.tableaus import ButcherTableau, builtin, check_order_conditions, new_tableau

__all__ = [
    "ButcherTableau",
    "Classification",
    "IntegrationError",
    "OdeProblem",
    "PROBLEM_NAMES",
    "ProblemCatalogEntry",
    "RelaxationConfig",
    "RelaxationError",
    "RootConfig",
    "RootResult",
    "SolveTrace",
    "StepAggregates",
    "StepMode",
    "StepOutput",
    "bracket_root",
    "builtin",
    "check_order_conditions",
    "find_root",
    "get_problem",
    "integrate",
    "new_tableau",
    "residual",
    "residual_derivative",
    "rk_stages",
    "solve_gamma",
    "solve_gamma_multi",
    "step",
]
