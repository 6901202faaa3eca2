import numpy as np
import pytest

from gbdd.grid import make_grid


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64, 64, 2 * np.pi, 2 * np.pi)


@pytest.fixture(scope="session")
def grid32_box8pi():
    return make_grid(32, 32, 8 * np.pi, 8 * np.pi)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
