import numpy as np
import pytest

from mimodeploy.montecarlo import SPEED_OF_LIGHT

WAVELENGTH = SPEED_OF_LIGHT / 2.6e9

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20141014)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
