import sys

import pytest


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is not None and module.LINES:
        terminalreporter.section("acceptance criteria")
        for line in module.LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    from poissoncomp.rng import RngStream

    return RngStream(12345)
