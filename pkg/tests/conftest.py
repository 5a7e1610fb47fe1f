import numpy as np
import pytest
from hypothesis import settings

from noncritical.elliptic import lattice_from_periods

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def square():
    return lattice_from_periods(1.0, 1j)


@pytest.fixture(scope="session")
def hexagonal():
    return lattice_from_periods(1.0, np.exp(1j * np.pi / 3))


@pytest.fixture(scope="session")
def skew():
    return lattice_from_periods(2.0, 1 + 1.5j)


@pytest.fixture(scope="session")
def square_stage(square):
    from noncritical.config import RunConfig
    from noncritical.pipeline import prepare

    return prepare(square, RunConfig())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
