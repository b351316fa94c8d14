import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nsopt import ActiveJacobianSet, GradientEvaluationError, numerical_gradient, opposes, project_onto_nullspace
from nsopt.benchmarks import rosenbrock


def test_gradient_of_square_at_three():
    g = numerical_gradient(lambda x: float(x[0] ** 2), np.array([3.0]), h=1e-7)
    assert abs(g[0] - 6.0) < 1e-6


def test_gradient_of_constant_is_zero():
    g = numerical_gradient(lambda x: 4.2, np.array([1.0, -7.0, 3.0]))
    np.testing.assert_array_equal(g, np.zeros(3))


def test_rosenbrock_gradient_at_origin():
    g = numerical_gradient(rosenbrock, np.zeros(2))
    np.testing.assert_allclose(g, [-2.0, 0.0], atol=1e-6)


@pytest.mark.parametrize("scheme, expected_calls", [("central", 8), ("forward", 5)])
def test_gradient_call_count_and_input_untouched(scheme, expected_calls):
    calls = []
    x = np.array([0.5, 1.0, -2.0, 3.0])
    before = x.copy()

    def fn(z):
        calls.append(z.copy())
        return float(np.sum(z**2))

    g = numerical_gradient(fn, x, scheme=scheme)
    assert len(calls) == expected_calls
    np.testing.assert_array_equal(x, before)
    np.testing.assert_allclose(g, 2 * x, rtol=1e-5)


def test_gradient_non_finite_probe_reports_coordinate():
    def fn(z):
        return math.inf if z[1] > 1.0 else 0.0

    with pytest.raises(GradientEvaluationError) as info:
        numerical_gradient(fn, np.array([0.0, 1.0]))
    assert info.value.coordinate == 1


def test_gradient_unknown_scheme():
    with pytest.raises(ValueError):
        numerical_gradient(lambda x: 0.0, np.zeros(1), scheme="backward")


def test_projection_removes_first_component():
    np.testing.assert_allclose(project_onto_nullspace([[1.0, 0.0]], [3.0, 4.0]), [0.0, 4.0])


def test_projection_full_rank_is_zero():
    j = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, 1.0], [3.0, 0.0, 1.0]])
    np.testing.assert_allclose(project_onto_nullspace(j, [1.0, -5.0, 2.0]), np.zeros(3), atol=1e-12)


def test_projection_onto_diagonal_complement():
    np.testing.assert_allclose(project_onto_nullspace([[1.0, 1.0]], [1.0, 0.0]), [0.5, -0.5])


def test_projection_zero_row_leaves_vector():
    np.testing.assert_array_equal(project_onto_nullspace(np.zeros((2, 3)), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])


@pytest.mark.parametrize(
    "j, g",
    [
        (np.zeros((0, 2)), np.zeros(2)),
        (np.zeros((1, 3)), np.zeros(2)),
        (np.zeros(3), np.zeros(3)),
    ],
)
def test_projection_shape_errors(j, g):
    with pytest.raises(ValueError):
        project_onto_nullspace(j, g)


def test_projection_agrees_with_scipy_null_space():
    scipy_linalg = pytest.importorskip("scipy.linalg")
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, n))
        j = rng.normal(size=(m, n))
        g = rng.normal(size=n)
        basis = scipy_linalg.null_space(j)
        np.testing.assert_allclose(project_onto_nullspace(j, g), basis @ (basis.T @ g), atol=1e-10)


@pytest.mark.parametrize(
    "a, b, expected",
    [((1, 0), (-1, 0), True), ((1, 0), (0, 1), False), ((1, 0), (1, 1), False)],
)
def test_opposes(a, b, expected):
    assert opposes(np.array(a, float), np.array(b, float)) is expected


def test_active_rows_keeps_equalities_and_opposing_inequalities():
    jac = ActiveJacobianSet(2)
    jac.eq_rows.append(np.array([1.0, 0.0]))
    jac.ineq_rows += [np.array([0.0, 1.0]), np.array([0.0, -1.0])]
    rows = jac.active_rows(np.array([0.0, 1.0]))
    assert len(rows) == 2
    np.testing.assert_array_equal(rows[1], [0.0, -1.0])
    assert jac.j_eq.shape == (1, 2) and jac.j_ineq.shape == (2, 2)
    jac.n_ac = 3
    jac.clear()
    assert jac.j_eq.shape == (0, 2) and jac.n_ac == 0


@st.composite
def jacobian_and_vector(draw):
    n = draw(st.integers(1, 10))
    m = draw(st.integers(1, n))
    elems = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
    j = draw(arrays(np.float64, (m, n), elements=elems))
    g = draw(arrays(np.float64, (n,), elements=elems))
    return j, g


@settings(max_examples=200, deadline=None)
@given(jacobian_and_vector())
def test_projection_properties(jg):
    j, g = jg
    p = project_onto_nullspace(j, g)
    scale = 1.0 + np.linalg.norm(g)
    assert np.linalg.norm(j @ p) <= 1e-8 * scale
    assert np.linalg.norm(p) <= np.linalg.norm(g) * (1 + 1e-12) + 1e-12
    np.testing.assert_allclose(project_onto_nullspace(j, p), p, atol=1e-10 * scale)


@settings(max_examples=100, deadline=None)
@given(jacobian_and_vector(), st.data())
def test_duplicate_rows_do_not_change_projection(jg, data):
    j, g = jg
    i = data.draw(st.integers(0, j.shape[0] - 1))
    doubled = np.vstack([j, j[i]])
    np.testing.assert_allclose(project_onto_nullspace(doubled, g), project_onto_nullspace(j, g), atol=1e-8 * (1 + np.linalg.norm(g)))


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, (4,), elements=st.floats(-5, 5)),
    arrays(np.float64, (4,), elements=st.floats(-10, 10)),
)
def test_cubic_gradient_accuracy_h_1e5(coef, x):
    # f = sum a_i x_i^3 + a_{i+1} x_i x_{i+1}
    def f(z):
        return float(np.sum(coef * z**3) + np.sum(coef[:-1] * z[:-1] * z[1:]))

    exact = 3 * coef * x**2
    exact[:-1] += coef[:-1] * x[1:]
    exact[1:] += coef[:-1] * x[:-1]
    got = numerical_gradient(f, x, h=1e-5)
    assert np.linalg.norm(got - exact) <= 1e-6 * max(1.0, np.linalg.norm(exact))
