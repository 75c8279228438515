import math

import numpy as np
import pytest
from hypothesis import settings

from fracsplit.grid import Field, GridSpec
from fracsplit.peregrine import LatticeSpec

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def grid64():
    return GridSpec(64, 32.0)


@pytest.fixture
def bump_field():
    """Smooth non-blow-up bump used by the order and self-convergence checks."""
    g = GridSpec(128, 20.0)
    return Field.from_function(g, lambda x: 0.5 * np.exp(-((x - 10.0) ** 2)))


@pytest.fixture
def lattice():
    # 16 cells of width 2*pi, 64 points per cell
    return LatticeSpec(2.0 * math.pi, 16, 64)


def random_field(rng, grid, sup=1.0):
    vals = rng.uniform(-sup, sup, size=grid.shape)
    return Field(grid, vals)


def brute_dft(values):
    """Mean-normalised DFT by the defining sum, O(n^2)."""
    n = values.shape[0]
    k = np.arange(n)
    j = np.concatenate([np.arange(n // 2), np.arange(-n // 2, 0)])
    w = np.exp(-2j * np.pi * np.outer(j, k) / n)
    return (w @ values) / n
