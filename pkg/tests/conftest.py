import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

from pgg import GameInstance  # noqa: E402

# criterion lines recorded by test_acceptance.py, echoed after the run
CRITERIA = {}


def make_game(n, edges, patterns):
    return GameInstance.build(n, edges, patterns)


@pytest.fixture
def criteria():
    return CRITERIA


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[key])
