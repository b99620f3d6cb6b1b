import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wolffsys import Params, SolverConfig, solve, unit_ball

settings.register_profile("wolffsys", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("wolffsys")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ball_sym():
    """The symmetric unit-ball solve (n=3, p=2, alpha=1, q=0.5) shared by several tests."""
    P = Params(3, 2.0, 1.0, 0.5, 0.5)
    return P, unit_ball(3), solve(P, unit_ball(3))


@pytest.fixture(scope="session")
def ball_asym():
    P = Params(3, 2.0, 1.0, 0.3, 0.8)
    return P, unit_ball(3), solve(P, unit_ball(3))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
