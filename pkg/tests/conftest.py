import numpy as np
import pytest

from nsopt import ProblemDescription, SolverConfig


class EvaluationLog:
    """Wraps a problem so every evaluator call is appended to ``events``.

    Events are one-letter codes: ``I`` interim, ``E`` equality, ``N``
    inequality, ``C`` cost.
    """

    def __init__(self, problem):
        self.events = []
        self.problem = problem

    def wrapped(self):
        p = self.problem

        def cost(x):
            self.events.append("C")
            return p.cost(x)

        def equality(x, k):
            self.events.append("E")
            return p.equality(x, k)

        def inequality(x, k):
            self.events.append("N")
            return p.inequality(x, k)

        def interim(x):
            self.events.append("I")
            if p.interim is not None:
                p.interim(x)

        return ProblemDescription(
            dimension=p.dimension,
            cost=cost,
            num_equality=p.num_equality,
            num_inequality=p.num_inequality,
            equality=equality if p.equality is not None else None,
            inequality=inequality if p.inequality is not None else None,
            interim=interim,
            name=p.name,
        )

    def per_iteration(self):
        """Event strings split at each interim call."""
        return ["I" + chunk for chunk in "".join(self.events).split("I")[1:]]


@pytest.fixture
def config():
    return SolverConfig()


@pytest.fixture
def quadratic():
    """``||x - c||^2`` in three dimensions without constraints."""
    c = np.array([1.0, -2.0, 0.5])

    def cost(x):
        d = x - c
        return float(d @ d)

    return ProblemDescription(dimension=3, cost=cost), c
