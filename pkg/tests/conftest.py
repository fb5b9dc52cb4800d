import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from _acceptance_log import LINES as ACCEPTANCE_LINES
from mpp.generators import random_martingale, random_space

settings.register_profile(
    "mpp", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("mpp")

def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_pair(rng):
    space = random_space(5, 24, rng)
    return random_martingale(space, rng), random_martingale(space, rng)
