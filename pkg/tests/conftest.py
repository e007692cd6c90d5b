import numpy as np
import pytest

from hardygauge import CircleFunction, sample_grid


@pytest.fixture(scope="session")
def grid():
    return sample_grid(4096)


@pytest.fixture(scope="session")
def small_grid():
    return sample_grid(64)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def make(grid, values):
    return CircleFunction(grid, values)
