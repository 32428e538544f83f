import os

import pytest

from removal_lab.config import ENV_PREFIX, Budgets, RunConfig, env_budgets, load_run_config, log_level
from removal_lab.errors import ParameterError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("SEED", "THREADS", "LOG_LEVEL", *("BUDGET_" + f.upper() for f in Budgets.model_fields)):
        monkeypatch.delenv(ENV_PREFIX + name, raising=False)


def test_defaults():
    config = load_run_config(threads=2)
    assert config.seed == 0
    assert config.threads == 2
    assert config.budgets == Budgets()
    assert config.fmt is None and config.out is None
    assert log_level() == "WARNING"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("REMOVAL_LAB_SEED", "7")
    monkeypatch.setenv("REMOVAL_LAB_THREADS", "3")
    monkeypatch.setenv("REMOVAL_LAB_BUDGET_PATTERN_VERTICES", "5")
    monkeypatch.setenv("REMOVAL_LAB_BUDGET_RS_MAX_M", "0x100")
    monkeypatch.setenv("REMOVAL_LAB_LOG_LEVEL", "debug")
    assert env_budgets() == {"pattern_vertices": 5, "rs_max_m": 256}
    config = load_run_config()
    assert (config.seed, config.threads) == (7, 3)
    assert config.budgets.pattern_vertices == 5
    assert log_level() == "DEBUG"


def test_explicit_values_win(monkeypatch):
    monkeypatch.setenv("REMOVAL_LAB_SEED", "7")
    monkeypatch.setenv("REMOVAL_LAB_BUDGET_PATTERN_VERTICES", "5")
    config = load_run_config(seed=11, budgets={"pattern_vertices": 6}, fmt="edges")
    assert config.seed == 11
    assert config.budgets.pattern_vertices == 6
    assert config.fmt == "edges"


def test_empty_variables_are_ignored(monkeypatch):
    monkeypatch.setenv("REMOVAL_LAB_SEED", " ")
    assert load_run_config(threads=1).seed == 0


@pytest.mark.parametrize("name,value", [
    ("REMOVAL_LAB_SEED", "seven"),
    ("REMOVAL_LAB_SEED", "-1"),
    ("REMOVAL_LAB_THREADS", "-2"),
    ("REMOVAL_LAB_BUDGET_BACKTRACKING_NODES", "0"),
])
def test_bad_values_raise(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ParameterError):
        load_run_config()


def test_bad_format_raises():
    with pytest.raises(ParameterError):
        load_run_config(threads=1, fmt="dot")


def test_thread_default_is_shared():
    assert RunConfig().threads == load_run_config().threads == (os.cpu_count() or 1)


def test_log_level_explicit_and_bad(monkeypatch):
    assert log_level("info") == "INFO"
    monkeypatch.setenv("REMOVAL_LAB_LOG_LEVEL", " ")
    assert log_level() == "WARNING"
    monkeypatch.setenv("REMOVAL_LAB_LOG_LEVEL", "chatty")
    with pytest.raises(ParameterError):
        log_level()
    assert log_level("error") == "ERROR"
