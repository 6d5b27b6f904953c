import sys

import pytest
from hypothesis import HealthCheck, settings

from ellipstat import Ellipse

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TABLE1_A = (0.5, 0.7, 0.9, 1.1, 1.3, 1.5)


@pytest.fixture
def circle():
    return Ellipse(1.0, 1.0)


@pytest.fixture
def wide():
    return Ellipse(1.5, 0.5)


def pytest_terminal_summary(terminalreporter):
    results = {}
    for module in list(sys.modules.values()):
        results.update(getattr(module, "ACCEPTANCE_RESULTS", None) or {})
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
