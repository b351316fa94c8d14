"""The three prioritized passes run inside every outer iteration.

Equality constraints are driven to zero one at a time, each inside the
nullspace of the ones before it. Violated inequality constraints are then
pushed back across their boundary, each inside the nullspace of the equality
rows and of the previously recorded inequality rows it would otherwise
disturb. Finally the cost descends inside the nullspace of everything that is
active. All three use the same geometric line search: start at
``initial_step_length`` and multiply by ``step_multiplier`` after every
accepted probe.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .numerics import (
    ActiveJacobianSet,
    EvaluationError,
    GradientEvaluationError,
    numerical_gradient,
    project_onto_nullspace,
)
from .problem import ProblemDescription, SolverConfig

_log = logging.getLogger(__name__)

_HUGE = 1e300
_MAX_COST_RESTARTS = 100


class LineSearchExit(str, enum.Enum):
    MINIMAL_POINT_REACHED = "minimal_point_reached"
    ZERO_CROSSING_REACHED = "zero_crossing_reached"
    INEQUALITY_VIOLATION = "inequality_violation"
    NO_PROGRESS = "no_progress"


@dataclass
class LineSearchOutcome:
    """Result of one geometric line search.

    ``steps`` lists every probed step length in order. ``x_final`` is the last
    accepted point, never a rejected probe.
    """

    kind: str
    index: Optional[int]
    x_final: np.ndarray
    evaluations: int
    exit: LineSearchExit
    steps: list = field(default_factory=list)
    accepted: int = 0


@dataclass
class SolverState:
    x: np.ndarray
    jacobians: ActiveJacobianSet
    cost: Optional[float] = None
    history: list = field(default_factory=list)
    keep_history: bool = False

    @classmethod
    def initial(cls, x0, keep_history=False):
        x = np.array(x0, dtype=float)
        return cls(x=x, jacobians=ActiveJacobianSet(x.shape[0]), keep_history=keep_history)

    def _record(self, outcome):
        if self.keep_history:
            self.history.append(outcome)


def _sign(value):
    # sign(0) is +1 so an exactly satisfied constraint still records its row.
    return -1.0 if value < 0 else 1.0


def _norm(v):
    return math.sqrt(float(np.dot(v, v)))


def scalar_evaluator(problem, kind, index=None):
    """Wrap one evaluator as ``fn(x) -> float`` that raises EvaluationError."""
    if kind == "cost":
        raw = problem.cost

        def call(z):
            try:
                return float(raw(z))
            except EvaluationError:
                raise
            except Exception as exc:
                raise EvaluationError(f"cost evaluator failed: {exc}", kind, None, z) from exc

    else:
        raw = problem.equality if kind == "equality" else problem.inequality

        def call(z):
            try:
                return float(raw(z, index))
            except EvaluationError:
                raise
            except Exception as exc:
                raise EvaluationError(f"{kind} evaluator {index} failed: {exc}", kind, index, z) from exc

    return call


def _value(fn, x, kind, index=None):
    v = fn(x)
    if not math.isfinite(v):
        label = kind if index is None else f"{kind} {index}"
        raise EvaluationError(f"{label} evaluator returned {v} at the current iterate", kind, index, x)
    return v


def _gradient(fn, x, config, kind, index=None):
    try:
        return numerical_gradient(fn, x, config.gradient_step, config.gradient_scheme)
    except GradientEvaluationError as exc:
        exc.kind, exc.index = kind, index
        raise


def _step_limit(direction):
    # Largest step that cannot overflow x - step * direction.
    biggest = float(np.max(np.abs(direction)))
    return _HUGE / biggest if biggest > 0 else math.inf


def _project(rows, d, config):
    if not rows:
        return d
    return project_onto_nullspace(np.vstack(rows), d, config.rank_tol)


def solve_equalities(state: SolverState, problem: ProblemDescription, config: SolverConfig) -> SolverState:
    """Drive each equality constraint toward zero, in index order.

    Clears the Jacobian set and restarts the active count. Every constraint
    with a non-zero gradient contributes its sign-adjusted gradient as a row
    of ``j_eq``, including constraints that are already satisfied, so the
    later passes keep away from them.
    """
    jac = state.jacobians
    jac.clear()
    zero = config.zero_tol
    for k in range(problem.num_equality):
        jac.n_ac += 1
        fn = scalar_evaluator(problem, "equality", k)
        c = _value(fn, state.x, "equality", k)
        d = _sign(c) * _gradient(fn, state.x, config, "equality", k)
        if _norm(d) <= zero:
            continue
        previous = list(jac.eq_rows)
        jac.eq_rows.append(d)
        if abs(c) <= zero:
            continue
        direction = _project(previous, d, config) if jac.n_ac > 1 else d
        if _norm(direction) <= zero:
            continue
        outcome = _equality_search(fn, state.x, c, direction, config, k)
        state.x = outcome.x_final
        state._record(outcome)
    return state


def _equality_search(fn, x, c, direction, config, k):
    # Accept while |g| does not grow; reverse direction whenever g changes sign.
    step = config.initial_step_length
    step_limit = _step_limit(direction)
    steps = []
    accepted = 0
    exit_ = LineSearchExit.MINIMAL_POINT_REACHED
    while True:
        if step > step_limit:
            exit_ = LineSearchExit.NO_PROGRESS
            break
        x_new = x - step * direction
        steps.append(step)
        c_new = fn(x_new)
        if not math.isfinite(c_new):
            exit_ = LineSearchExit.NO_PROGRESS
            break
        if abs(c_new) > abs(c):
            break
        if _sign(c_new) != _sign(c):
            direction = -direction
        x, c = x_new, c_new
        accepted += 1
        step *= config.step_multiplier
    return LineSearchOutcome("equality", k, x, len(steps), exit_, steps, accepted)


def solve_inequalities(state: SolverState, problem: ProblemDescription, config: SolverConfig) -> SolverState:
    """Push every currently violated inequality constraint back to ``g < 0``.

    Constraints with ``g(x) < 0`` are skipped. For a violated constraint the
    descent direction is its gradient projected away from the equality rows
    and from any earlier inequality row it opposes. The search stops at the
    first probe strictly inside the feasible region and keeps that probe.
    """
    jac = state.jacobians
    jac.ineq_rows.clear()
    zero = config.zero_tol
    for k in range(problem.num_inequality):
        fn = scalar_evaluator(problem, "inequality", k)
        c = _value(fn, state.x, "inequality", k)
        if c < 0:
            continue
        d = _gradient(fn, state.x, config, "inequality", k)
        if _norm(d) <= zero:
            continue
        jac.n_ac += 1
        jac.ineq_rows.append(d)
        if jac.n_ac > 1:
            direction = _project(jac.active_rows(d), d, config)
        else:
            direction = d
        if _norm(direction) <= zero:
            continue
        outcome = _inequality_search(fn, state.x, c, direction, config, k)
        state.x = outcome.x_final
        state._record(outcome)
    return state


def _inequality_search(fn, x, c, direction, config, k):
    step = config.initial_step_length
    step_limit = _step_limit(direction)
    steps = []
    accepted = 0
    while True:
        if step > step_limit:
            exit_ = LineSearchExit.NO_PROGRESS
            break
        x_new = x - step * direction
        steps.append(step)
        c_new = fn(x_new)
        if not math.isfinite(c_new) or c_new > c:
            # moving away from the boundary along this ray
            exit_ = LineSearchExit.NO_PROGRESS
            break
        x, c = x_new, c_new
        accepted += 1
        if c_new < 0:
            exit_ = LineSearchExit.ZERO_CROSSING_REACHED
            break
        step *= config.step_multiplier
    return LineSearchOutcome("inequality", k, x, len(steps), exit_, steps, accepted)


def minimize_cost(state: SolverState, problem: ProblemDescription, config: SolverConfig) -> SolverState:
    """Descend the cost inside the nullspace of the active constraints.

    The active set is every equality row plus each recorded inequality row
    whose gradient opposes the cost gradient. A probe is rejected when the
    cost rises or when an inequality that was satisfied at the last accepted
    point becomes positive.

    On such a violation the offending constraints join the active set (each
    at most once per call), the direction is re-projected and a fresh search
    starts from the last accepted point. If every offender is already active
    the violation comes from curvature; the search restarts along the same
    direction as long as the previous search accepted at least one probe.
    ``state.cost`` always ends as ``cost(state.x)``.
    """
    zero = config.zero_tol
    cost_fn = scalar_evaluator(problem, "cost")
    x = state.x
    c = _value(cost_fn, x, "cost")
    state.cost = c
    d = _gradient(cost_fn, x, config, "cost")
    if _norm(d) <= zero:
        return state

    jac = state.jacobians
    active = jac.active_rows(d)
    if jac.n_ac > 0:
        direction = _project(active, d, config)
        if _norm(direction) <= zero:
            return state
    else:
        direction = d

    ineqs = [scalar_evaluator(problem, "inequality", i) for i in range(problem.num_inequality)]
    g_current = [_value(g, x, "inequality", i) for i, g in enumerate(ineqs)]
    activated = set()

    for _ in range(_MAX_COST_RESTARTS):
        outcome, x, c, violated = _cost_search(cost_fn, ineqs, g_current, x, c, direction, config)
        state._record(outcome)
        if not violated:
            break
        added = False
        for i in violated:
            if i in activated:
                continue
            activated.add(i)
            row = _gradient(ineqs[i], x, config, "inequality", i)
            if _norm(row) > zero:
                active.append(row)
                added = True
        if added:
            direction = _project(active, d, config)
            if _norm(direction) <= zero:
                break
        elif outcome.accepted == 0:
            # already tangent to every violated constraint and no room left
            break

    state.x = x
    state.cost = c
    return state


def _cost_search(cost_fn, ineqs, g_current, x, c, direction, config):
    """One geometric search on the cost.

    Returns ``(outcome, x, cost, violated)``; ``g_current`` is updated in place
    to the inequality values at the returned point. ``violated`` lists the
    constraints that ended the search by becoming positive.
    """
    step = config.initial_step_length
    step_limit = _step_limit(direction)
    steps = []
    accepted = 0
    violated = []
    exit_ = LineSearchExit.MINIMAL_POINT_REACHED
    while True:
        if step > step_limit:
            exit_ = LineSearchExit.NO_PROGRESS
            break
        x_new = x - step * direction
        steps.append(step)
        c_new = cost_fn(x_new)
        if not math.isfinite(c_new):
            exit_ = LineSearchExit.NO_PROGRESS
            break
        if c_new > c:
            break
        g_new = [g(x_new) for g in ineqs]
        violated = [i for i, (old, new) in enumerate(zip(g_current, g_new)) if old <= 0 and not new <= 0]
        if violated:
            exit_ = LineSearchExit.INEQUALITY_VIOLATION
            break
        x, c = x_new, c_new
        g_current[:] = g_new
        accepted += 1
        step *= config.step_multiplier
    return LineSearchOutcome("cost", None, x, len(steps), exit_, steps, accepted), x, c, violated
