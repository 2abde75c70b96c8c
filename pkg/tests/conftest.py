import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gutzmer import make_space

settings.register_profile("default", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SPACE_NAMES = ("circle", "sphere2", "su2")


@pytest.fixture(params=SPACE_NAMES)
def space(request):
    return make_space(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Collects one summary line per acceptance criterion."""
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
