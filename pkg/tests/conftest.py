import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hetsec.channels import generate_channel_set  # noqa: E402
from hetsec.model import NetworkConfig  # noqa: E402


@pytest.fixture(scope="session")
def net():
    return NetworkConfig()


@pytest.fixture(scope="session")
def feasible_seed():
    # a default-scenario draw the method is known to solve
    return 5


@pytest.fixture(scope="session")
def channels(net, feasible_seed):
    return generate_channel_set(net, feasible_seed)


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
