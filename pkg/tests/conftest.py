import numpy as np
import pytest

from lvcfact.grid import GridSpec, ProductGrid
from lvcfact.hamiltonian import solve_vibronic
from lvcfact.model import BUTATRIENE, butatriene_1d

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def params_1d():
    return butatriene_1d()


@pytest.fixture(scope="session")
def params_2d():
    return BUTATRIENE


@pytest.fixture(scope="session")
def grid_1d(params_1d):
    return ProductGrid.from_specs(GridSpec(-9.0, 9.0, 401, params_1d.omega_x))


@pytest.fixture(scope="session")
def small_grid_2d(params_2d):
    return ProductGrid.from_specs(GridSpec(-8.0, 8.0, 41, params_2d.omega_x), GridSpec(-8.0, 8.0, 41, params_2d.omega_y))


@pytest.fixture(scope="session")
def states_1d(params_1d, grid_1d):
    states, res = solve_vibronic(params_1d, grid_1d, 10)
    return states, res


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
