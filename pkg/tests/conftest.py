import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("qorth", max_examples=60, deadline=None)
settings.load_profile("qorth")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
