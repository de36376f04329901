import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from simplexlearn.bounding import HeuristicBallWarning

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_heuristic_ball():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HeuristicBallWarning)
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
