import pytest
from hypothesis import given, strategies as st

from segal_lab.config import ENV_BUDGETS, ConfigError, RunConfig, parse_budgets


def test_defaults():
    cfg = RunConfig()
    assert cfg.bounds == (3, 3)
    assert cfg.output == "human"


@pytest.mark.parametrize("kwargs", [
    {"bounds": (1, 3)}, {"bounds": (3,)}, {"lifting_budget": 0}, {"max_stages": -1},
    {"output": "xml"}, {"congruence_budget": 2.5},
])
def test_invalid_values_are_rejected(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs)


def test_env_key_value_pairs():
    cfg = RunConfig().with_env({ENV_BUDGETS: "lifting=500, stages=2"})
    assert cfg.lifting_budget == 500
    assert cfg.max_stages == 2
    assert cfg.congruence_budget == RunConfig().congruence_budget


def test_env_json_object():
    cfg = RunConfig().with_env({ENV_BUDGETS: '{"congruence": 7, "max_stages": 3}'})
    assert (cfg.congruence_budget, cfg.max_stages) == (7, 3)


def test_empty_env_changes_nothing():
    assert RunConfig().with_env({ENV_BUDGETS: "  "}) == RunConfig()
    assert RunConfig().with_env({}) == RunConfig()


@pytest.mark.parametrize("raw", ["lifting", "speed=3", "lifting=fast", "{not json", "[1, 2]"])
def test_bad_env_values(raw):
    with pytest.raises(ConfigError):
        RunConfig().with_env({ENV_BUDGETS: raw})


def test_env_budget_must_stay_positive():
    with pytest.raises(ConfigError):
        RunConfig().with_env({ENV_BUDGETS: "lifting=0"})


@given(lifting=st.integers(1, 10 ** 9), stages=st.integers(1, 50))
def test_budget_strings_round_trip(lifting, stages):
    out = parse_budgets(f"lifting={lifting},stages={stages}")
    assert out == {"lifting_budget": lifting, "max_stages": stages}
    assert parse_budgets(f'{{"lifting": {lifting}, "stages": {stages}}}') == out
