"""Outer optimization loop."""

from __future__ import annotations

import dataclasses
import enum
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import EvaluationError
from .problem import ConfigError, ProblemDescription, SolverConfig, validate
from .subroutines import SolverState, minimize_cost, scalar_evaluator, solve_equalities, solve_inequalities

_log = logging.getLogger(__name__)


class ExitReason(str, enum.Enum):
    STEP_TOLERANCE = "step_tolerance"
    COST_TOLERANCE = "cost_tolerance"
    MAX_ITERATIONS = "max_iterations"


@dataclass
class IterationRecord:
    """One row of the per-iteration trace."""

    iteration: int
    cost: float
    step_norm: float
    max_eq_residual: float
    max_ineq_value: float


@dataclass
class OptimizationReport:
    x_star: np.ndarray
    cost_final: float
    equality_residuals: np.ndarray
    inequality_values: np.ndarray
    outer_iterations: int
    exit_reason: ExitReason
    cost_trace: list
    evaluation_counts: dict
    wall_time: float
    trace: list = field(default_factory=list)
    history: list = field(default_factory=list)

    @property
    def max_violation(self):
        """Largest of ``|g_eq|`` and ``max(0, g_ineq)``; 0 without constraints."""
        eq = float(np.max(np.abs(self.equality_residuals))) if self.equality_residuals.size else 0.0
        ineq = float(np.max(self.inequality_values)) if self.inequality_values.size else 0.0
        return max(eq, ineq, 0.0)


class OptimizationError(RuntimeError):
    """An evaluator failed mid-run.

    Carries the iterate reached so far (``x``), the outer iteration in which
    the failure happened and the original :class:`EvaluationError`.
    """

    def __init__(self, message, iteration, x, cost_trace, cause):
        super().__init__(message)
        self.iteration = iteration
        self.x = x
        self.cost_trace = cost_trace
        self.cause = cause


class _Counter:
    __slots__ = ("fn", "calls")

    def __init__(self, fn):
        self.fn = fn
        self.calls = 0

    def __call__(self, *args):
        self.calls += 1
        return self.fn(*args)


def _run_interim(hook, x):
    try:
        hook(x.copy())
    except Exception as exc:
        raise EvaluationError(f"interim hook failed: {exc}", "interim", None, x) from exc


def _residuals(problem, x):
    eq = np.array([problem.equality(x, k) for k in range(problem.num_equality)], dtype=float)
    ineq = np.array([problem.inequality(x, k) for k in range(problem.num_inequality)], dtype=float)
    return eq, ineq


def optimize(
    problem: ProblemDescription,
    x0,
    config: Optional[SolverConfig] = None,
    *,
    trace: bool = False,
    keep_history: bool = False,
) -> OptimizationReport:
    """Run the prioritized solver from ``x0``.

    Each outer iteration calls ``problem.interim`` once, then the equality
    pass, the inequality pass and the cost pass. The loop stops when the
    iterate moves less than ``step_tol`` or the cost pass changes the cost by
    less than ``cost_tol``; constraint feasibility is not a stopping test, so
    check the residuals on the returned report.

    Parameters
    ----------
    trace : bool
        Evaluate constraint residuals after every outer iteration and store
        them in ``report.trace``. These extra evaluations are not counted.
    keep_history : bool
        Keep every :class:`LineSearchOutcome` in ``report.history``.

    Raises
    ------
    ConfigError
        Invalid problem, configuration or starting point.
    OptimizationError
        An evaluator raised or produced a non-finite value at an iterate.
    """
    config = config or SolverConfig()
    validate(problem, config).raise_for_error()
    x0 = np.array(x0, dtype=float)
    if x0.shape != (problem.dimension,):
        raise ConfigError("x0", f"expected shape ({problem.dimension},), got {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise ConfigError("x0", "starting point has non-finite entries")

    counters = {"cost": _Counter(problem.cost)}
    if problem.equality is not None:
        counters["equality"] = _Counter(problem.equality)
    if problem.inequality is not None:
        counters["inequality"] = _Counter(problem.inequality)
    counted = dataclasses.replace(
        problem,
        cost=counters["cost"],
        equality=counters.get("equality"),
        inequality=counters.get("inequality"),
    )

    cost_fn = scalar_evaluator(counted, "cost")

    start = time.perf_counter()
    state = SolverState.initial(x0, keep_history=keep_history)
    cost_trace = []
    records = []
    exit_reason = ExitReason.MAX_ITERATIONS
    iteration = 0
    try:
        for iteration in range(1, config.max_iter + 1):
            x_prev = state.x.copy()
            if problem.interim is not None:
                _run_interim(problem.interim, state.x)
            solve_equalities(state, counted, config)
            solve_inequalities(state, counted, config)
            cost_before = cost_fn(state.x)
            if not math.isfinite(cost_before):
                raise EvaluationError(f"cost evaluator returned {cost_before}", "cost", None, state.x)
            minimize_cost(state, counted, config)
            cost_trace.append(state.cost)

            step_norm = float(np.linalg.norm(state.x - x_prev))
            if trace:
                eq, ineq = _residuals(problem, state.x)
                records.append(
                    IterationRecord(
                        iteration,
                        state.cost,
                        step_norm,
                        float(np.max(np.abs(eq))) if eq.size else 0.0,
                        float(np.max(ineq)) if ineq.size else math.nan,
                    )
                )
            if step_norm < config.step_tol:
                exit_reason = ExitReason.STEP_TOLERANCE
                break
            if abs(state.cost - cost_before) < config.cost_tol:
                exit_reason = ExitReason.COST_TOLERANCE
                break
    except EvaluationError as exc:
        raise OptimizationError(
            f"evaluator failure in outer iteration {iteration}: {exc}",
            iteration,
            state.x.copy(),
            list(cost_trace),
            exc,
        ) from exc
    wall_time = time.perf_counter() - start

    eq, ineq = _residuals(problem, state.x)
    _log.debug("finished after %d outer iterations (%s)", iteration, exit_reason.value)
    return OptimizationReport(
        x_star=state.x.copy(),
        cost_final=float(problem.cost(state.x)),
        equality_residuals=eq,
        inequality_values=ineq,
        outer_iterations=iteration,
        exit_reason=exit_reason,
        cost_trace=cost_trace,
        evaluation_counts={k: counters[k].calls if k in counters else 0 for k in ("cost", "equality", "inequality")},
        wall_time=wall_time,
        trace=records,
        history=state.history,
    )
