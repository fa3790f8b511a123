import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from colombeau.epsnet import (
    EPS, X, Antideriv, Bump, Const, Cos, DomainError, EpsNet, Erf, Exp, Pow, Sin,
    add, constant_net, derive, evaluate, mul, neg, one_net, sup_on, zero_net,
)
from colombeau.mollify import Heaviside, delta_net, embed

from conftest import gaussian_density


# --- random trees -------------------------------------------------------------

leaves = st.one_of(
    st.just(X), st.just(EPS),
    st.floats(-2, 2, allow_nan=False).map(Const),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: t[0] + t[1]),
        st.tuples(children, children).map(lambda t: t[0] * t[1]),
        st.tuples(children, children).map(lambda t: t[0] / (Const(1.5) + Sin(t[1]))),
        st.tuples(children, st.integers(0, 3)).map(lambda t: Pow(t[0], t[1])),
        children.map(Sin), children.map(Cos), children.map(Erf),
        children.map(lambda c: Exp(Sin(c))),
    )


trees = st.recursive(leaves, _extend, max_leaves=6)
eps_values = st.floats(0.01, 1.0)
x_values = st.floats(-2.0, 2.0)


def _net(expr):
    return EpsNet(expr, "t")


def _rel_close(a, b, rtol, atol=1e-12):
    return abs(a - b) <= rtol * max(abs(a), abs(b)) + atol


# --- operation examples ----------------------------------------------------------

def test_add_identity_and_inverse(bump):
    h = embed(Heaviside(), bump)
    assert evaluate(add(h, zero_net()), 0.1, 0.5) == evaluate(h, 0.1, 0.5)
    xs = np.linspace(-3, 3, 31)
    u = EpsNet(X, "x")
    assert np.all(evaluate(add(u, neg(u)), 0.3, xs) == 0.0)


def test_add_delta_twice(bump, bump_density):
    d = delta_net(bump)
    for e in (0.5, 0.1, 0.01):
        assert evaluate(add(d, d), e, 0.0) == pytest.approx(2 * bump_density(0.0) / e, rel=1e-12)


def test_mul_heaviside_squared_at_jump(gaussian, bump):
    for rho in (gaussian, bump):
        h = embed(Heaviside(), rho)
        for e in (1.0, 0.3, 1e-3):
            assert evaluate(mul(h, h), e, 0.0) == pytest.approx(0.25, abs=1e-12)


def test_mul_by_one_is_identity(bump):
    h = embed(Heaviside(), bump)
    xs = np.linspace(-1, 1, 101)
    assert np.array_equal(evaluate(mul(h, one_net()), 0.2, xs), evaluate(h, 0.2, xs))


def test_derive_heaviside_is_delta(bump, bump_density):
    h = embed(Heaviside(), bump)
    for e in (0.5, 0.05):
        xs = np.linspace(-1.2 * e, 1.2 * e, 41)
        expected = bump_density(xs / e) / e
        np.testing.assert_allclose(evaluate(derive(h), e, xs), expected, rtol=1e-12, atol=1e-12)


def test_derive_constant_is_zero():
    xs = np.linspace(-1, 1, 5)
    assert np.all(evaluate(derive(constant_net(3.7)), 0.5, xs) == 0.0)


@pytest.mark.parametrize("e", [1.0, 0.25, 0.05])
def test_derive_product_matches_finite_differences(e):
    u = EpsNet(Sin(X * Pow(EPS, -1)) + Erf(X) * Exp(Cos(X)), "u")
    uu = mul(u, u)
    xs = np.linspace(-1.0, 1.0, 23)
    h = 1e-5
    fd = (evaluate(uu, e, xs + h) - evaluate(uu, e, xs - h)) / (2 * h)
    exact = evaluate(derive(uu), e, xs)
    scale = np.maximum(np.abs(exact), 1.0)
    assert np.max(np.abs(fd - exact) / scale) <= 1e-6


def test_eval_examples(gaussian, bump, bump_density):
    assert evaluate(zero_net(), 0.5, 3.0) == 0.0
    for e in (1.0, 0.1, 1e-4):
        assert evaluate(embed(Heaviside(), gaussian), e, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert evaluate(delta_net(bump), 0.25, 0.0) == pytest.approx(bump_density(0.0) / 0.25, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.5])
def test_eval_rejects_eps_outside_unit_interval(bad):
    with pytest.raises(DomainError):
        evaluate(one_net(), bad, 0.0)


def test_sup_on_examples(bump, bump_density):
    assert sup_on(zero_net(), (-1, 1), 0.3, 100) == 0.0
    d = delta_net(bump)
    for e in (0.25, 1e-2, 1.2e-4):
        assert sup_on(d, (-1, 1), e, 1000) == pytest.approx(bump_density(0.0) / e, rel=1e-8)
    h = embed(Heaviside(), bump)
    for e in (0.2, 0.05):
        v = sup_on(h, (-1, 1), e, 1000)
        assert 1 - 1e-6 <= v <= 1.0 + 1e-14


def test_sup_on_gaussian_heaviside_below_one(gaussian):
    v = sup_on(embed(Heaviside(), gaussian), (-1, 1), 0.2, 1000)
    assert 1 - 1e-6 <= v <= 1.0 + 1e-14


def test_sup_on_errors():
    with pytest.raises(DomainError):
        sup_on(one_net(), (1.0, -1.0), 0.5)
    with pytest.raises(ValueError):
        sup_on(one_net(), (0.0, 1.0), 0.5, grid_n=1)


# --- tree identities ----------------------------------------------------------------

def test_antideriv_derivative_is_integrand():
    p = Exp(-X * X) * Cos(3 * X)
    prim = Antideriv(p, X, origin=-0.5)
    xs = np.linspace(-2, 2, 41)
    np.testing.assert_array_equal(prim.derive().evaluate(1.0, xs), p.evaluate(1.0, xs))


def test_antideriv_values_against_closed_form():
    prim = Antideriv(Cos(X), X, origin=0.0)
    xs = np.array([-3.0, -0.2, 0.0, 0.7, 5.0])
    np.testing.assert_allclose(prim.evaluate(1.0, xs), np.sin(xs), atol=1e-12)


def test_erf_derivative_is_gaussian():
    xs = np.linspace(-3, 3, 13)
    d = Erf(X).derive().evaluate(1.0, xs)
    np.testing.assert_allclose(d, 2 / math.sqrt(math.pi) * np.exp(-xs**2), rtol=1e-14)


def test_bump_derivative_chain_closes():
    b = Bump(2 * X, 1)
    xs = np.linspace(-0.49, 0.49, 37)
    h = 1e-6
    fd = (b.evaluate(1, xs + h) - b.evaluate(1, xs - h)) / (2 * h)
    np.testing.assert_allclose(b.derive().evaluate(1, xs), fd, rtol=1e-6, atol=1e-8)
    assert b.evaluate(1, np.array([0.5, 0.7, -3.0])).tolist() == [0.0, 0.0, 0.0]


def test_gaussian_kernel_tree(gaussian):
    xs = np.linspace(-4, 4, 17)
    np.testing.assert_allclose(gaussian.density(xs), gaussian_density(xs), rtol=1e-15)


# --- algebra laws on random trees ------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(trees, trees, trees, eps_values, x_values)
def test_ring_laws(a, b, c, e, x):
    u, v, w = _net(a), _net(b), _net(c)
    ev = lambda n: evaluate(n, e, x)
    assert _rel_close(ev(add(u, v)), ev(add(v, u)), 1e-12)
    assert _rel_close(ev(mul(u, v)), ev(mul(v, u)), 1e-12)
    assert _rel_close(ev(add(add(u, v), w)), ev(add(u, add(v, w))), 1e-12)
    assert _rel_close(ev(mul(mul(u, v), w)), ev(mul(u, mul(v, w))), 1e-12)
    assert _rel_close(ev(mul(u, add(v, w))), ev(add(mul(u, v), mul(u, w))), 1e-12, atol=1e-11)


@settings(max_examples=60, deadline=None)
@given(trees, trees, eps_values, x_values)
def test_leibniz_rule(a, b, e, x):
    u, v = _net(a), _net(b)
    lhs = evaluate(derive(mul(u, v)), e, x)
    rhs = evaluate(add(mul(derive(u), v), mul(u, derive(v))), e, x)
    assert _rel_close(lhs, rhs, 1e-10, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(trees, st.floats(-1.5, 1.5))
def test_derive_of_antideriv_is_integrand(a, x):
    from colombeau.epsnet import compose
    p = compose(a, X) if not a.has_eps else Sin(X)
    prim = Antideriv(p, X, origin=0.0)
    assert prim.derive().evaluate(1.0, x) == pytest.approx(float(p.evaluate(1.0, x)), abs=0)


# --- concurrency ---------------------------------------------------------------

def test_concurrent_evaluation_matches_serial(bump):
    h = embed(Heaviside(), bump)
    u = mul(mul(h, h), derive(h))
    grids = [np.linspace(-0.3, 0.3, 257) + 1e-3 * i for i in range(16)]
    serial = [evaluate(u, 0.1, g) for g in grids]
    with ThreadPoolExecutor(max_workers=8) as pool:
        parallel = list(pool.map(lambda g: evaluate(u, 0.1, g), grids))
    for s, p in zip(serial, parallel):
        np.testing.assert_array_equal(s, p)
