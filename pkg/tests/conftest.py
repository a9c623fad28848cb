import numpy as np
import pytest

from footprint_mppi.geometry import fixture_footprint, polygon_footprint

GALLERY = ("t_shape", "f_shape", "l_shape", "star", "arrow", "diamond", "trapezoid")
RECTILINEAR = ("l_shape", "t_shape", "f_shape")


@pytest.fixture(scope="session")
def gallery():
    return {name: fixture_footprint(name) for name in GALLERY}


@pytest.fixture
def unit_square():
    return polygon_footprint("unit", [[0, 0], [1, 0], [1, 1], [0, 1]])


@pytest.fixture
def notch_l():
    # concave L used by several worked examples
    return polygon_footprint("l_notch", [[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]])


def uniform_points(n, seed, half=25.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(-half, half, size=(n, 2))


# acceptance results collected by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
