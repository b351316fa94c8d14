"""Constrained black-box optimization by prioritized nullspace projection."""

from .benchmarks import REGISTRY, BenchmarkProblem, UnknownProblemError, get_problem
from .driver import ExitReason, IterationRecord, OptimizationError, OptimizationReport, optimize
from .numerics import (
    ActiveJacobianSet,
    EvaluationError,
    GradientEvaluationError,
    numerical_gradient,
    opposes,
    project_onto_nullspace,
)
from .problem import ConfigError, ProblemDescription, SolverConfig, ValidationResult, validate
from .subroutines import (
    LineSearchExit,
    LineSearchOutcome,
    SolverState,
    minimize_cost,
    solve_equalities,
    solve_inequalities,
)

__all__ = [
    "ActiveJacobianSet",
    "BenchmarkProblem",
    "ConfigError",
    "EvaluationError",
    "ExitReason",
    "GradientEvaluationError",
    "IterationRecord",
    "LineSearchExit",
    "LineSearchOutcome",
    "OptimizationError",
    "OptimizationReport",
    "ProblemDescription",
    "REGISTRY",
    "SolverConfig",
    "SolverState",
    "UnknownProblemError",
    "ValidationResult",
    "get_problem",
    "minimize_cost",
    "numerical_gradient",
    "opposes",
    "optimize",
    "project_onto_nullspace",
    "solve_equalities",
    "solve_inequalities",
    "validate",
]
