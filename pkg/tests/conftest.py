import numpy as np
import pytest

from spectral_nash.games import BimatrixGame


def cycle(n):
    A = np.zeros((n, n))
    for i in range(n):
        A[i, (i + 1) % n] = 1.0
    return A


def undirected_cycle(n):
    C = cycle(n)
    return C + C.T


@pytest.fixture
def rps():
    # row i beats column i+1; the unique symmetric equilibrium is uniform
    return cycle(3)


@pytest.fixture
def pennies():
    return BimatrixGame([[1, 0], [0, 1]], [[0, 1], [1, 0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
