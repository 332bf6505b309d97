from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from sfn.network import FlowNetwork, O, S, Splitter, fair

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def two_loop() -> FlowNetwork:
    """Two fair splitters feeding each other; exits 2/3 and 1/3."""
    return FlowNetwork((fair(0, O(0), S(1)), fair(1, S(0), O(1))), S(0), 2)


def von_neumann(p: Fraction) -> FlowNetwork:
    """Three p-biased splitters producing a fair coin."""
    return FlowNetwork((
        Splitter(0, p, S(1), S(2)),
        Splitter(1, p, S(0), O(0)),
        Splitter(2, p, O(1), S(0)),
    ), S(0), 2)


@pytest.fixture
def loop_net() -> FlowNetwork:
    return two_loop()
