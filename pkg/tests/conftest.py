import math

import numpy as np
import pytest
from scipy import integrate

from colombeau.mollify import make_mollifier


@pytest.fixture(scope="session")
def bump():
    return make_mollifier("bump")


@pytest.fixture(scope="session")
def gaussian():
    return make_mollifier("gaussian")


def raw_bump(y):
    y = np.asarray(y, dtype=float)
    inside = np.abs(y) < 1
    t = np.where(inside, 1 - y * y, 1.0)
    return np.where(inside, np.exp(-1 / t), 0.0)


@pytest.fixture(scope="session")
def bump_mass():
    """int exp(-1/(1-y^2)) over [-1, 1], by scipy's QUADPACK."""
    return integrate.quad(lambda y: float(raw_bump(y)), -1, 1, epsabs=1e-15, epsrel=1e-13)[0]


@pytest.fixture(scope="session")
def bump_density(bump_mass):
    return lambda y: raw_bump(y) / bump_mass


def gaussian_density(y):
    return np.exp(-0.5 * np.asarray(y) ** 2) / math.sqrt(2 * math.pi)
