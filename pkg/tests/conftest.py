import numpy as np
import pytest

from vvps.modgroup import I2, S, t_power


def random_element(rng, max_len=12):
    """Random product of the generators S, T, T^{-1}."""
    g = I2
    gens = (S, t_power(1), t_power(-1))
    for _ in range(int(rng.integers(1, max_len + 1))):
        g = g * gens[int(rng.integers(0, 3))]
    return g


def random_tau(rng, y_lo=0.2, y_hi=3.0):
    return complex(rng.uniform(-2.0, 2.0), rng.uniform(y_lo, y_hi))


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)
