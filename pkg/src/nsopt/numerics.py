"""Finite-difference gradients and nullspace projection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class EvaluationError(RuntimeError):
    """A user evaluator raised or returned a non-finite value.

    Attributes
    ----------
    kind : str
        ``"cost"``, ``"equality"`` or ``"inequality"`` (empty when unknown).
    index : int or None
        Zero-based constraint index, ``None`` for the cost.
    x : numpy.ndarray or None
        Point at which the evaluation failed.
    """

    def __init__(self, message, kind="", index=None, x=None):
        super().__init__(message)
        self.kind = kind
        self.index = index
        self.x = None if x is None else np.array(x, dtype=float)


class GradientEvaluationError(EvaluationError):
    """A probe inside :func:`numerical_gradient` was non-finite.

    ``coordinate`` is the component whose perturbation failed.
    """

    def __init__(self, message, coordinate, kind="", index=None, x=None):
        super().__init__(message, kind=kind, index=index, x=x)
        self.coordinate = coordinate


def numerical_gradient(fn, x, h=1e-7, scheme="central"):
    """Finite-difference gradient of a scalar function.

    Parameters
    ----------
    fn : callable
        ``fn(x) -> float``.
    x : numpy.ndarray, shape (n,)
        Evaluation point. Left unmodified.
    h : float
        Absolute perturbation applied to each coordinate.
    scheme : {"central", "forward"}
        Central differences use ``2n`` calls, forward differences ``n + 1``.

    Returns
    -------
    numpy.ndarray, shape (n,)

    Raises
    ------
    GradientEvaluationError
        If any probe value is NaN or infinite.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    probe = x.copy()
    grad = np.empty(n)
    if scheme == "central":
        inv = 0.5 / h
        for i in range(n):
            xi = probe[i]
            probe[i] = xi + h
            fp = fn(probe)
            probe[i] = xi - h
            fm = fn(probe)
            probe[i] = xi
            if not (math.isfinite(fp) and math.isfinite(fm)):
                raise GradientEvaluationError(f"non-finite value while differentiating coordinate {i}", coordinate=i, x=x)
            grad[i] = (fp - fm) * inv
    elif scheme == "forward":
        f0 = fn(probe)
        if not math.isfinite(f0):
            raise GradientEvaluationError("non-finite value at the base point", coordinate=None, x=x)
        for i in range(n):
            xi = probe[i]
            probe[i] = xi + h
            fp = fn(probe)
            probe[i] = xi
            if not math.isfinite(fp):
                raise GradientEvaluationError(f"non-finite value while differentiating coordinate {i}", coordinate=i, x=x)
            grad[i] = (fp - f0) / h
    else:
        raise ValueError(f"unknown difference scheme {scheme!r}")
    return grad


def project_onto_nullspace(j, g, rank_tol=1e-10):
    """Orthogonal projection of ``g`` onto the nullspace of ``j``.

    Computes ``(I - J^T (J J^T)^+ J) g`` as ``g`` minus its component in the
    row space of ``J``, using the right singular vectors of ``J``. Singular
    values below ``rank_tol * max`` are treated as zero, so linearly
    dependent or duplicated rows are harmless. No singular value is ever
    inverted, so nearly dependent rows that survive the cutoff cost no
    accuracy.

    Parameters
    ----------
    j : array_like, shape (m, n)
        Row-stacked constraint gradients, ``m >= 1``.
    g : array_like, shape (n,)

    Returns
    -------
    numpy.ndarray, shape (n,)
    """
    j = np.asarray(j, dtype=float)
    g = np.asarray(g, dtype=float)
    if j.ndim != 2 or g.ndim != 1:
        raise ValueError(f"expected a 2-D Jacobian and a 1-D vector, got shapes {j.shape} and {g.shape}")
    if j.shape[0] < 1:
        raise ValueError("Jacobian must have at least one row")
    if j.shape[1] != g.shape[0]:
        raise ValueError(f"Jacobian has {j.shape[1]} columns but the vector has length {g.shape[0]}")

    if j.shape[0] == 1:
        scale = float(np.max(np.abs(j[0])))
        if scale == 0.0:
            return g.copy()
        row = j[0] / scale  # rescaled so tiny rows do not underflow
        return g - row * (float(row @ g) / float(row @ row))

    _, s, vt = np.linalg.svd(j, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return g.copy()
    rank = int(np.count_nonzero(s > rank_tol * s[0]))
    basis = vt[:rank]
    return g - basis.T @ (basis @ g)


def opposes(a, b):
    """True when the two vectors point into opposite half-spaces (``a . b < 0``)."""
    return float(np.dot(a, b)) < 0.0


@dataclass
class ActiveJacobianSet:
    """Constraint gradients recorded during one outer iteration.

    ``eq_rows`` and ``ineq_rows`` hold one gradient per recorded constraint.
    ``n_ac`` counts constraints treated as active so far.
    """

    dimension: int
    eq_rows: list = field(default_factory=list)
    ineq_rows: list = field(default_factory=list)
    n_ac: int = 0

    def clear(self):
        self.eq_rows.clear()
        self.ineq_rows.clear()
        self.n_ac = 0

    @property
    def j_eq(self):
        return _stack(self.eq_rows, self.dimension)

    @property
    def j_ineq(self):
        return _stack(self.ineq_rows, self.dimension)

    def active_rows(self, direction):
        """Equality rows plus every inequality row that opposes ``direction``."""
        return list(self.eq_rows) + [r for r in self.ineq_rows if opposes(r, direction)]


def _stack(rows, n):
    if not rows:
        return np.zeros((0, n))
    return np.vstack(rows)
