import sys

import pytest

from sidelink import make_delta_noise


@pytest.fixture(scope="session")
def dn64():
    return make_delta_noise(64, 0.25)


@pytest.fixture(scope="session")
def dn256():
    return make_delta_noise(256, 0.25)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
