import math

import pytest
from hypothesis import settings

from conley_infinity.polyfield import parse_field

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

QUADRATIC_SIX = "dx1 = x1^2 + x2^2 - 1; dx2 = 5*(x1*x2 - 1)"


def six_angles():
    """Zeros of T = x2 (4 x1^2 - x2^2) on the circle, by hand."""
    a = math.atan2(2, 1)
    b = math.atan2(-2, 1)
    return sorted(t % (2 * math.pi) for t in (0.0, math.pi, a, a + math.pi, b, b + math.pi))


@pytest.fixture
def quad6():
    return parse_field(QUADRATIC_SIX)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance check")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance")
        for line in RESULTS:
            terminalreporter.write_line(line)
