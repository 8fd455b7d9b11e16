import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240901))


def rng_for(seed):
    return np.random.Generator(np.random.Philox(seed))


def ginibre(n, rng, m=None):
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0)


def rel_err(x, y):
    return np.linalg.norm(x - y, 2) / np.linalg.norm(y, 2)
