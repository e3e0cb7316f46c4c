import numpy as np
import pytest

from onsagerkit.generators import random_divfree
from onsagerkit.spectral import make_grid


@pytest.fixture(scope="session")
def grid16():
    return make_grid(16)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(32)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def broadband_field(grid, seed, top_shell=None):
    """Random divergence-free field with a decaying multi-shell profile."""
    if top_shell is None:
        top_shell = 4 if grid.kmax >= 10 else 2
    amps = [0.0] + [2.0 ** (-0.7 * q) for q in range(1, top_shell + 1)]
    return random_divfree(grid, amps, seed=seed)
