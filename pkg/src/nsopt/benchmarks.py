"""Built-in benchmark problems with published reference optima.

All constraints are written in the solver's canonical form: equalities
``g(x) = 0`` and inequalities ``g(x) < 0``. Two-sided bounds become two
scalar inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .problem import ProblemDescription

GRAVITY = 9.81


class UnknownProblemError(KeyError):
    def __init__(self, problem_id):
        super().__init__(problem_id)
        self.problem_id = problem_id

    def __str__(self):
        return f"unknown problem id {self.problem_id!r}; known ids: {', '.join(REGISTRY)}"


@dataclass(frozen=True)
class BenchmarkProblem:
    """A problem bundled with its start point and published optimum.

    ``tol_ref`` bounds ``||x* - x_ref||_inf`` for a run to count as
    reproducing the reference. With ``periodic`` set, coordinate differences
    are wrapped to ``[-pi, pi)`` first (joint angles).
    """

    id: str
    description: ProblemDescription
    x0: np.ndarray
    x_ref: np.ndarray
    tol_ref: float
    periodic: bool = False

    def distance_to_reference(self, x):
        diff = np.asarray(x, dtype=float) - self.x_ref
        if self.periodic:
            diff = (diff + math.pi) % (2 * math.pi) - math.pi
        return float(np.max(np.abs(diff)))


def simple_convex() -> BenchmarkProblem:
    """Separable quadratic with two fixed coordinates and two bounded ones."""

    def cost(x):
        x1, x2, x3, x4, x5 = x.tolist()
        return (x1 - 1.0) ** 2 + (x2 - 2.0) ** 2 + (x3 - 3.0) ** 2 + (x4 - 4.0) ** 2 + (x5 - 5.0) ** 2

    def equality(x, k):
        return x[0] + 5.0 if k == 0 else x[1] - 5.0

    def inequality(x, k):
        return x[2] + 3.0 if k == 0 else x[3] - 3.0

    problem = ProblemDescription(
        dimension=5,
        cost=cost,
        num_equality=2,
        num_inequality=2,
        equality=equality,
        inequality=inequality,
        name="simple_convex",
    )
    return BenchmarkProblem(
        "simple_convex",
        problem,
        x0=np.zeros(5),
        x_ref=np.array([-5.0, 5.0, -3.0, 3.0, 5.0]),
        tol_ref=1e-2,
    )


def rosenbrock(x):
    a = x[1] - x[0] * x[0]
    b = 1.0 - x[0]
    return 100.0 * a * a + b * b


def rosenbrock_disk() -> BenchmarkProblem:
    """Rosenbrock's function restricted to the closed unit disk."""

    def inequality(x, k):
        return x[0] * x[0] + x[1] * x[1] - 1.0

    problem = ProblemDescription(
        dimension=2,
        cost=rosenbrock,
        num_inequality=1,
        inequality=inequality,
        name="rosenbrock_disk",
    )
    return BenchmarkProblem(
        "rosenbrock_disk",
        problem,
        x0=np.zeros(2),
        x_ref=np.array([0.7864, 0.6177]),
        tol_ref=2e-2,
    )


def hs071() -> BenchmarkProblem:
    """Hock-Schittkowski problem 71.

    Inequality 0 is the product constraint ``25 - x1 x2 x3 x4 < 0``.
    Inequalities ``1 + 2i`` and ``2 + 2i`` are the bounds ``1 - x_i < 0`` and
    ``x_i - 5 < 0``.
    """

    def cost(x):
        return x[0] * x[3] * (x[0] + x[1] + x[2]) + x[2]

    def equality(x, k):
        return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - 40.0

    def inequality(x, k):
        if k == 0:
            return 25.0 - x[0] * x[1] * x[2] * x[3]
        i, upper = divmod(k - 1, 2)
        return x[i] - 5.0 if upper else 1.0 - x[i]

    problem = ProblemDescription(
        dimension=4,
        cost=cost,
        num_equality=1,
        num_inequality=9,
        equality=equality,
        inequality=inequality,
        name="hs071",
    )
    return BenchmarkProblem(
        "hs071",
        problem,
        x0=np.array([1.0, 5.0, 5.0, 1.0]),
        x_ref=np.array([1.00, 4.74, 3.82, 1.38]),
        tol_ref=5e-2,
    )


def arm_end_effector(x):
    """Planar end-effector position of three unit links with relative joint angles."""
    a1 = x[0]
    a2 = a1 + x[1]
    a3 = a2 + x[2]
    return (
        math.cos(a1) + math.cos(a2) + math.cos(a3),
        math.sin(a1) + math.sin(a2) + math.sin(a3),
    )


def arm_gravity_torque(x, g=GRAVITY):
    """Static joint torques needed to hold the arm against gravity."""
    a1 = x[0]
    a2 = a1 + x[1]
    a3 = a2 + x[2]
    c3 = 0.5 * math.cos(a3)
    c2 = 1.5 * math.cos(a2) + c3
    return ((2.5 * math.cos(a1) + c2) * g, c2 * g, c3 * g)


def three_link_arm() -> BenchmarkProblem:
    """Hold the end effector at (-1, 0) with the least static torque."""

    def cost(x):
        t1, t2, t3 = arm_gravity_torque(x)
        return t1 * t1 + t2 * t2 + t3 * t3

    def equality(x, k):
        px, py = arm_end_effector(x)
        return px + 1.0 if k == 0 else py

    problem = ProblemDescription(
        dimension=3,
        cost=cost,
        num_equality=2,
        equality=equality,
        name="three_link_arm",
    )
    return BenchmarkProblem(
        "three_link_arm",
        problem,
        x0=np.full(3, math.pi / 4),
        x_ref=np.array([1.647, 3.141, -1.647]),
        tol_ref=5e-2,
        periodic=True,
    )


REGISTRY = {
    "simple_convex": simple_convex,
    "rosenbrock_disk": rosenbrock_disk,
    "hs071": hs071,
    "three_link_arm": three_link_arm,
}


def get_problem(problem_id: str) -> BenchmarkProblem:
    try:
        factory = REGISTRY[problem_id]
    except KeyError:
        raise UnknownProblemError(problem_id) from None
    return factory()
