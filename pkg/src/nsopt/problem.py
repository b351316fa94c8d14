"""Problem description and solver configuration.

A problem is handed to the solver as four callables: the cost, one scalar
equality constraint per index, one scalar inequality constraint per index,
and an optional ``interim`` hook that runs once per outer iteration.

Sign conventions::

    minimize    cost(x)                      cost(x) >= 0
    subject to  equality(x, k)   == 0        k = 0 .. num_equality - 1
                inequality(x, k) <  0        k = 0 .. num_inequality - 1
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Callable, Optional

import numpy as np

CostFn = Callable[[np.ndarray], float]
ConstraintFn = Callable[[np.ndarray, int], float]
InterimFn = Callable[[np.ndarray], None]

GRADIENT_SCHEMES = ("central", "forward")


class ConfigError(ValueError):
    """Raised when a problem or solver configuration fails validation."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class ProblemDescription:
    """User-supplied optimization problem.

    The cost should be non-negative. This is not checked at runtime and the
    solver never depends on it.

    Constraint callables take the point and a zero-based constraint index, so
    a line search over one constraint never pays for the others. Anything
    expensive and shared (dynamics terms, kinematics) can be cached by
    ``interim``, which is called once at the start of every outer iteration
    and never from inside gradient estimation.
    """

    dimension: int
    cost: CostFn
    num_equality: int = 0
    num_inequality: int = 0
    equality: Optional[ConstraintFn] = None
    inequality: Optional[ConstraintFn] = None
    interim: Optional[InterimFn] = None
    name: str = ""


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters.

    The first four defaults are the published parameter set. The remaining
    fields are tolerances the method needs but does not name.
    """

    initial_step_length: float = 1e-6
    step_multiplier: float = 2.0
    step_tol: float = 1e-4
    cost_tol: float = 1e-4
    max_iter: int = 1000
    gradient_step: float = 1e-7
    zero_tol: float = 1e-10
    rank_tol: float = 1e-10
    gradient_scheme: str = "central"

    def replace(self, **overrides) -> "SolverConfig":
        """Copy with the given fields changed; ``None`` values are ignored."""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise TypeError(f"unknown SolverConfig field(s): {sorted(unknown)}")
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update({k: v for k, v in overrides.items() if v is not None})
        return SolverConfig(**current)


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    field: Optional[str] = None
    message: str = ""

    def __bool__(self):
        return self.ok

    def raise_for_error(self):
        if not self.ok:
            raise ConfigError(self.field, self.message)


_POSITIVE_REALS = (
    "initial_step_length",
    "step_tol",
    "cost_tol",
    "gradient_step",
    "zero_tol",
    "rank_tol",
)


def _is_int(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _is_real(value):
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool)


def validate(problem: ProblemDescription, config: SolverConfig) -> ValidationResult:
    """Check a problem/config pair, reporting the first violated field.

    Pure: no evaluator is called.
    """
    if not _is_int(problem.dimension) or problem.dimension < 1:
        return ValidationResult(False, "dimension", f"must be a positive integer, got {problem.dimension!r}")
    for name in ("num_equality", "num_inequality"):
        value = getattr(problem, name)
        if not _is_int(value) or value < 0:
            return ValidationResult(False, name, f"must be a non-negative integer, got {value!r}")
    if not callable(problem.cost):
        return ValidationResult(False, "cost", "cost evaluator is not callable")
    if problem.num_equality > 0 and not callable(problem.equality):
        return ValidationResult(False, "equality", "num_equality > 0 but no equality evaluator given")
    if problem.num_inequality > 0 and not callable(problem.inequality):
        return ValidationResult(False, "inequality", "num_inequality > 0 but no inequality evaluator given")
    if problem.interim is not None and not callable(problem.interim):
        return ValidationResult(False, "interim", "interim hook is not callable")

    for name in _POSITIVE_REALS:
        value = getattr(config, name)
        if not _is_real(value) or not np.isfinite(value) or value <= 0:
            return ValidationResult(False, name, f"must be a positive finite real, got {value!r}")
    multiplier = config.step_multiplier
    if not _is_real(multiplier) or not np.isfinite(multiplier) or multiplier <= 1:
        return ValidationResult(False, "step_multiplier", f"must be a finite real > 1, got {multiplier!r}")
    if not _is_int(config.max_iter) or config.max_iter < 1:
        return ValidationResult(False, "max_iter", f"must be a positive integer, got {config.max_iter!r}")
    if config.gradient_scheme not in GRADIENT_SCHEMES:
        return ValidationResult(
            False, "gradient_scheme", f"must be one of {GRADIENT_SCHEMES}, got {config.gradient_scheme!r}"
        )
    return ValidationResult(True)
