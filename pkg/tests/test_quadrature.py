import math

import numpy as np
import pytest
from scipy import integrate as si

from colombeau.quadrature import (
    GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, QuadratureError, integrate, panel_integrals,
)


def test_rule_weights_integrate_constants():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # the 7-point Gauss rule is exact through degree 13
    assert np.dot(GAUSS_WEIGHTS, NODES**12) == pytest.approx(2 / 13, abs=1e-15)
    assert np.dot(KRONROD_WEIGHTS, NODES**22) == pytest.approx(2 / 23, abs=1e-15)


@pytest.mark.parametrize("f, a, b", [
    (np.exp, 0.0, 1.0),
    (lambda x: np.sin(50 * x) ** 2, 0.0, 3.0),
    (lambda x: 1.0 / (1e-4 + x * x), -1.0, 1.0),
    (lambda x: np.sqrt(np.abs(x)), -1.0, 2.0),
])
def test_matches_quadpack(f, a, b):
    ours, err = integrate(f, a, b, breakpoints=[0.0], abs_tol=1e-11)
    ref = si.quad(lambda t: float(f(np.array([t]))[0]), a, b, points=[0.0] if a < 0 < b else None,
                  epsabs=1e-13, epsrel=1e-13, limit=500)[0]
    assert ours == pytest.approx(ref, abs=1e-10)
    assert err <= 1e-10


def test_reversed_and_empty_interval():
    assert integrate(np.cos, 1.0, 0.0)[0] == pytest.approx(-math.sin(1.0), abs=1e-14)
    assert integrate(np.cos, 1.0, 1.0) == (0.0, 0.0)


def test_vector_valued_panels():
    f = lambda x: np.stack([np.sin(x), np.cos(x)], axis=1)
    parts, _ = panel_integrals(f, [0.0, 1.0, 2.0], abs_tol=1e-13)
    assert parts.shape == (2, 2)
    assert parts[:, 0].sum() == pytest.approx(1 - math.cos(2.0), abs=1e-13)
    assert parts[1, 1] == pytest.approx(math.sin(2.0) - math.sin(1.0), abs=1e-13)


def test_budget_exhaustion_is_reported():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.sin(1.0 / np.maximum(np.abs(x), 1e-300)), 0.0, 1.0,
                  abs_tol=1e-14, max_panels=64)
