import math

import numpy as np
import pytest
from scipy import integrate

from colombeau.asymptotics import EpsLadder
from colombeau.epsnet import Const, DomainError, EpsNet, Sin, X, add, derive, mul, zero_net
from colombeau.mollify import Dirac, FiniteSum, Heaviside, Smooth, delta_net, embed
from colombeau.pairing import (
    TestFunction, associated, default_test_functions, line_integral, pair, pair_limit,
    plateau, rate_probe, schwartz_core,
)
from colombeau.quadrature import QuadratureError


def _quad(f, a, b):
    return integrate.quad(lambda x: float(f(x)), a, b, epsabs=1e-13, epsrel=1e-12, limit=400)[0]


# --- test functions --------------------------------------------------------------

def test_plateau_shape():
    psi = plateau(-1.0, 1.0)
    xs = np.linspace(-0.5, 0.5, 11)
    np.testing.assert_allclose(psi(xs), 1.0, atol=1e-15)
    assert np.all(psi(np.array([-1.0, 1.0, -2.0, 3.0])) == 0.0)
    vals = psi(np.linspace(-1, 1, 401))
    assert vals.min() >= 0.0 and vals.max() <= 1.0 + 1e-15


def test_default_test_functions_values_at_origin():
    vals = [float(psi(0.0)) for psi in default_test_functions()]
    assert vals == pytest.approx([1.0, 1.0, 0.5], abs=1e-13)
    assert float(rate_probe()(0.0)) == 0.0


def test_test_function_validation():
    with pytest.raises(ValueError):
        TestFunction(Const(1.0), (-1.0, 1.0))
    with pytest.raises(ValueError):
        TestFunction(plateau(-1, 1).expr, (1.0, -1.0))
    from colombeau.epsnet import EPS
    with pytest.raises(ValueError):
        TestFunction(plateau(-1, 1).expr * EPS, (-1.0, 1.0))
    with pytest.raises(ValueError):
        plateau(0.0, 0.5)


def test_test_function_integral_against_oracle():
    psi = plateau(-0.5, 2.0)
    assert psi.integral() == pytest.approx(_quad(psi, -0.5, 2.0), abs=1e-12)


# --- pair ----------------------------------------------------------------------

def test_pair_zero():
    assert pair(zero_net(), plateau(-1, 1), 0.3) == 0.0


def test_pair_delta_plateau(bump):
    psi = plateau(-1.0, 1.0)
    assert pair(delta_net(bump), psi, 0.05) == pytest.approx(1.0, abs=1e-9)
    assert pair(delta_net(bump), psi, 0.1) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("e", [0.05, 0.01, 0.002])
def test_pair_heaviside_against_exact_heaviside_oracle(bump, e):
    for psi in default_test_functions():
        oracle = _quad(psi, 0.0, psi.support[1])
        assert pair(embed(Heaviside(), bump), psi, e) == pytest.approx(oracle, abs=2 * e)


def test_pair_smooth_against_oracle(gaussian):
    psi = plateau(-1.0, 1.0)
    u = embed(Smooth(Sin(X) + X * X), gaussian)
    e = 0.3
    # closed form of the Gaussian-mollified integrand
    f = lambda x: (math.sin(x) * math.exp(-e * e / 2) + x * x + e * e) * float(psi(x))
    assert pair(u, psi, e) == pytest.approx(_quad(f, -1, 1), abs=1e-9)


def test_pair_linearity(bump):
    psi = plateau(-0.5, 2.0)
    u, v = embed(Heaviside(0.2), bump), embed(Dirac(1, -0.1), bump)
    for e in (0.2, 0.01):
        assert pair(add(u, v), psi, e) == pytest.approx(pair(u, psi, e) + pair(v, psi, e), abs=1e-9)


def test_pair_rejects_bad_eps(bump):
    with pytest.raises(DomainError):
        pair(delta_net(bump), plateau(-1, 1), 0.0)


def test_pair_quadrature_budget_failure(bump):
    with pytest.raises(QuadratureError):
        pair(delta_net(bump), plateau(-1, 1), 1e-3, abs_tol=1e-15, max_panels=20)


def test_line_integral_of_delta(bump):
    assert line_integral(delta_net(bump), 0.01, -1, 1) == pytest.approx(1.0, abs=1e-10)


# --- limits -----------------------------------------------------------------------

def test_pair_limit_delta(bump):
    for psi in default_test_functions():
        lim = pair_limit(delta_net(bump), psi)
        assert lim.status == "ok"
        assert lim.limit == pytest.approx(float(psi(0.0)), abs=1e-6)


def test_pair_limit_h_times_h_prime(bump, gaussian):
    for rho in (bump, gaussian):
        h = embed(Heaviside(), rho)
        for psi in default_test_functions():
            lim = pair_limit(mul(h, derive(h)), psi)
            assert lim.limit == pytest.approx(float(psi(0.0)) / 2, abs=1e-6)
            lim3 = pair_limit(mul(mul(h, h), derive(h)), psi)
            assert lim3.limit == pytest.approx(float(psi(0.0)) / 3, abs=1e-6)


def test_pair_limit_zero():
    lim = pair_limit(zero_net(), plateau(-1, 1))
    assert lim.limit == 0.0
    assert lim.rate.classification == "NegligibleCandidate"


def test_pair_limit_divergent_is_indeterminate(bump):
    # <delta^2, psi> ~ 1/eps never settles
    d = delta_net(bump)
    lim = pair_limit(mul(d, d), plateau(-1, 1))
    assert lim.indeterminate


def test_pair_limit_richardson_improves_on_last_value():
    # <x-shift of a smooth bump> with known O(eps) error
    psi = plateau(-1.0, 1.0)
    from colombeau.epsnet import EPS
    u = EpsNet(Const(1.0) + EPS, "1+eps")
    lim = pair_limit(u, psi)
    assert lim.limit == pytest.approx(psi.integral(), abs=1e-9)
    assert lim.exponent == pytest.approx(1.0, abs=0.01)


# --- association --------------------------------------------------------------------

def test_associated_h_squared_h(bump):
    h = embed(Heaviside(), bump)
    rep = associated(mul(h, h), h)
    assert rep.associated is True
    assert rep.verdict == "associated on tested set"
    for e in rep.entries:
        assert abs(e.limit) <= 1e-6
        assert e.rate.slope == pytest.approx(1.0, abs=0.1)


def test_associated_reflexive_and_symmetric(bump):
    h = embed(Heaviside(), bump)
    u, v = mul(h, h), h
    assert associated(u, u).associated is True
    a, b = associated(u, v), associated(v, u)
    assert a.associated == b.associated
    for x, y in zip(a.entries, b.entries):
        assert x.limit == pytest.approx(-y.limit, abs=1e-12)


def test_associated_transitive_triple(bump, gaussian):
    hb, hg = embed(Heaviside(), bump), embed(Heaviside(), gaussian)
    hb2 = mul(hb, hb)
    assert associated(hb2, hb).associated
    assert associated(hb, hg).associated
    rep = associated(hb2, hg)
    assert all(abs(e.limit) <= 2e-6 for e in rep.entries)


def test_not_associated_h_h_prime(bump):
    h = embed(Heaviside(), bump)
    hp = derive(h)
    rep = associated(mul(h, hp), mul(mul(h, h), hp))
    assert rep.associated is False
    assert rep.verdict == "not associated"
    for e, psi in zip(rep.entries, default_test_functions()):
        assert e.limit == pytest.approx(float(psi(0.0)) / 6, abs=1e-6)


def test_dirac_and_twice_dirac_not_associated(bump):
    d = delta_net(bump)
    dd = embed(FiniteSum(((2.0, Dirac()),)), bump)
    assert associated(d, dd).associated is False


def test_association_indeterminate_propagates(bump):
    d = delta_net(bump)
    rep = associated(mul(d, d), zero_net())
    assert rep.associated is None
    assert rep.verdict == "indeterminate"


def test_associated_needs_tests(bump):
    with pytest.raises(ValueError):
        associated(delta_net(bump), delta_net(bump), [])


def test_rate_probe_sees_higher_order(bump):
    h = embed(Heaviside(), bump)
    rep = associated(mul(h, h), h, [rate_probe()])
    assert rep.associated
    assert rep.entries[0].rate.slope == pytest.approx(3.0, abs=0.1)


# --- Schwartz core ----------------------------------------------------------------

def test_schwartz_core_examples(bump, gaussian):
    assert schwartz_core(bump, 0.5) == pytest.approx(-1 / 6, abs=1e-9)
    assert schwartz_core(gaussian, 0.01) == pytest.approx(-1 / 6, abs=1e-8)


def test_schwartz_core_trivial_integrand(bump):
    h = embed(Heaviside(), bump)
    zero_integrand = mul(add(h, EpsNet(Const(-1.0) * h.expr, "-h", 0, h.features)), derive(h))
    assert line_integral(zero_integrand, 0.1, -0.1, 0.1) == 0.0


def test_schwartz_core_eps_independence(bump, gaussian):
    vals = [schwartz_core(rho, e) for rho in (bump, gaussian) for e in EpsLadder().values]
    assert max(vals) - min(vals) < 1e-8
