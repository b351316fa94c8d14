import math

import pytest

from nsopt import ConfigError, ProblemDescription, SolverConfig, validate


def _problem(**kw):
    base = dict(
        dimension=5,
        cost=lambda x: 0.0,
        num_equality=2,
        num_inequality=2,
        equality=lambda x, k: 0.0,
        inequality=lambda x, k: -1.0,
    )
    base.update(kw)
    return ProblemDescription(**base)


def test_defaults_match_published_parameters():
    cfg = SolverConfig()
    assert cfg.initial_step_length == 1e-6
    assert cfg.step_multiplier == 2
    assert cfg.step_tol == 1e-4
    assert cfg.cost_tol == 1e-4
    assert (cfg.gradient_step, cfg.zero_tol, cfg.rank_tol) == (1e-7, 1e-10, 1e-10)
    assert cfg.gradient_scheme == "central"


def test_five_dimensional_problem_with_defaults_is_valid():
    result = validate(_problem(), SolverConfig())
    assert result
    assert result.field is None


def test_zero_dimension_names_dimension():
    result = validate(_problem(dimension=0), SolverConfig())
    assert not result
    assert result.field == "dimension"


def test_unit_multiplier_names_multiplier():
    result = validate(_problem(), SolverConfig(step_multiplier=1.0))
    assert not result
    assert result.field == "step_multiplier"


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"initial_step_length": 0.0}, "initial_step_length"),
        ({"step_tol": -1e-4}, "step_tol"),
        ({"cost_tol": 0.0}, "cost_tol"),
        ({"gradient_step": math.nan}, "gradient_step"),
        ({"zero_tol": 0.0}, "zero_tol"),
        ({"rank_tol": -1.0}, "rank_tol"),
        ({"step_multiplier": 0.5}, "step_multiplier"),
        ({"max_iter": 0}, "max_iter"),
        ({"max_iter": 2.5}, "max_iter"),
        ({"gradient_scheme": "backward"}, "gradient_scheme"),
    ],
)
def test_each_bad_setting_has_its_own_field(overrides, field):
    result = validate(_problem(), SolverConfig(**overrides))
    assert not result
    assert result.field == field
    assert result.message


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"num_equality": -1}, "num_equality"),
        ({"num_inequality": -2}, "num_inequality"),
        ({"cost": None}, "cost"),
        ({"equality": None}, "equality"),
        ({"inequality": None}, "inequality"),
        ({"interim": 3}, "interim"),
        ({"dimension": True}, "dimension"),
    ],
)
def test_problem_shape_errors(overrides, field):
    assert validate(_problem(**overrides), SolverConfig()).field == field


def test_unconstrained_problem_needs_no_constraint_callables():
    p = ProblemDescription(dimension=1, cost=lambda x: float(x[0] ** 2))
    assert validate(p, SolverConfig())


def test_validate_is_pure():
    p, cfg = _problem(dimension=0), SolverConfig()
    assert validate(p, cfg) == validate(p, cfg)


def test_raise_for_error_carries_field():
    with pytest.raises(ConfigError) as info:
        validate(_problem(), SolverConfig(cost_tol=0.0)).raise_for_error()
    assert info.value.field == "cost_tol"


def test_replace_ignores_none_and_rejects_unknown():
    cfg = SolverConfig().replace(max_iter=7, step_tol=None)
    assert cfg.max_iter == 7 and cfg.step_tol == 1e-4
    with pytest.raises(TypeError):
        SolverConfig().replace(learning_rate=0.1)
