import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def affine_regressor(X, u):
    return np.array([u])


def cubic_regressor(X, u):
    return np.array([u ** 3 + u])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_RUNS = {}


def scenario_result(name, **overrides):
    """Run a built-in scenario once per test session."""
    from ailc.harness import get_scenario, run_scenario

    key = (name, tuple(sorted(overrides.items())))
    if key not in _RUNS:
        cfg = get_scenario(name)
        if overrides:
            cfg = cfg.with_overrides(**overrides)
        _RUNS[key] = run_scenario(cfg)
    return _RUNS[key]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
