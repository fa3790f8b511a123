"""Mollifier kernels and the embedding of model distributions into nets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .epsnet import (
    EPS, X, Antideriv, Bump, Const, Convolution, EpsNet, Erf, Exp, Pow,
    SmoothExpr, add, compose, zero_net,
)
from .quadrature import integrate

__all__ = [
    "MomentConstraintError", "Mollifier", "make_mollifier",
    "Dirac", "Heaviside", "Sign", "AbsX", "Smooth", "FiniteSum",
    "embed", "delta_net",
]

GAUSSIAN_RADIUS = 12.0
KINDS = ("gaussian", "bump", "poly_moment")


class MomentConstraintError(ValueError):
    def __init__(self, kind, moment, value, target):
        self.moment = moment
        super().__init__(f"{kind}: moment {moment} is {value:.3e}, required {target}")


@dataclass(frozen=True)
class Mollifier:
    """Normalized kernel with ``int y^k rho = 0`` for ``1 <= k <= q``.

    ``pdf`` and ``cdf`` are trees in ``X``; ``radius`` is the support radius
    (infinite for the Gaussian) and ``effective_radius`` the finite window
    used for quadrature.
    """

    kind: str
    q: int
    radius: float
    effective_radius: float
    pdf: SmoothExpr
    cdf: SmoothExpr

    def density(self, y):
        return self.pdf.evaluate(1.0, y)

    def moment(self, k, tol=1e-14):
        r = self.effective_radius
        f = lambda y: y**k * self.pdf.evaluate(1.0, y)
        return float(integrate(f, -r, r, np.linspace(-r, r, 9), abs_tol=tol)[0])

    @property
    def peak(self):
        """rho(0)."""
        return float(self.pdf.evaluate(1.0, 0.0))


def _bump_moments(n):
    """int_{-1}^{1} y^k exp(-1/(1-y^2)) dy for k = 0..n."""
    ks = np.arange(n + 1)
    b = Bump(X)
    f = lambda y: y[:, None] ** ks[None, :] * b.evaluate(1.0, y)[:, None]
    return integrate(f, -1.0, 1.0, np.linspace(-1, 1, 9), abs_tol=1e-16)[0]


def _check_moments(m):
    if abs(m.moment(0) - 1.0) > 1e-10:
        raise MomentConstraintError(m.kind, 0, m.moment(0), 1)
    for k in range(1, m.q + 1):
        v = m.moment(k)
        if abs(v) > 1e-9:
            raise MomentConstraintError(m.kind, k, v, 0)


def make_mollifier(kind="bump", q=None) -> Mollifier:
    """Build a kernel of the given kind and moment order.

    ``gaussian`` and ``bump`` are symmetric, so their first moment vanishes
    (``q <= 1``); ``poly_moment`` multiplies the bump by a polynomial chosen
    to annihilate moments ``1..q``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown mollifier kind {kind!r}; expected one of {KINDS}")
    if q is not None and q < 0:
        raise ValueError("moment order q must be >= 0")
    if kind == "gaussian":
        q = 1 if q is None else q
        if q > 1:
            raise MomentConstraintError(kind, 2, 1.0, 0)
        pdf = Exp(Const(-0.5) * Pow(X, 2)) * (1.0 / math.sqrt(2.0 * math.pi))
        cdf = Const(0.5) + Const(0.5) * Erf(X * (1.0 / math.sqrt(2.0)))
        m = Mollifier(kind, q, math.inf, GAUSSIAN_RADIUS, pdf, cdf)
    else:
        if kind == "bump":
            q = 1 if q is None else q
            if q > 1:
                mom = _bump_moments(2)
                raise MomentConstraintError(kind, 2, mom[2] / mom[0], 0)
            coef = np.array([1.0 / _bump_moments(0)[0]])
        else:
            if q is None:
                raise ValueError("poly_moment needs an explicit q")
            coef = _poly_coefficients(q)
        poly = reduce(lambda acc, j: acc + Const(coef[j]) * Pow(X, j),
                      range(1, coef.size), Const(coef[0]))
        pdf = poly * Bump(X)
        cdf = Antideriv(pdf, X, origin=-1.0, support=(-1.0, 1.0), upper_value=1.0)
        m = Mollifier(kind, q, 1.0, 1.0, pdf, cdf)
    _check_moments(m)
    return m


def _poly_coefficients(q):
    # rows: moments 0..q of y^j * bump; unknowns: coefficients of y^0..y^q
    mom = _bump_moments(2 * q)
    gram = np.array([[mom[k + j] for j in range(q + 1)] for k in range(q + 1)])
    rhs = np.zeros(q + 1)
    rhs[0] = 1.0
    coef, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
    return coef


# --- model distributions -------------------------------------------------

@dataclass(frozen=True)
class Dirac:
    order: int = 0
    center: float = 0.0

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("derivative order must be >= 0")


@dataclass(frozen=True)
class Heaviside:
    center: float = 0.0


@dataclass(frozen=True)
class Sign:
    pass


@dataclass(frozen=True)
class AbsX:
    pass


@dataclass(frozen=True)
class Smooth:
    expr: SmoothExpr
    label: str = "f"

    def __post_init__(self):
        if self.expr.has_eps:
            raise ValueError("Smooth distribution must not depend on eps")


@dataclass(frozen=True)
class FiniteSum:
    terms: tuple = ()  # of (coefficient, model)


def _scaled_arg(center):
    return (X - center) * Pow(EPS, -1)


def embed(d, rho: Mollifier) -> EpsNet:
    """Regularize a model distribution by convolution with ``rho_eps``."""
    R = rho.effective_radius
    if isinstance(d, Heaviside):
        return EpsNet(compose(rho.cdf, _scaled_arg(d.center)), f"H[{d.center:g}]", 0,
                      ((d.center, R),))
    if isinstance(d, Dirac):
        kern = rho.pdf
        for _ in range(d.order):
            kern = kern.derive()
        expr = compose(kern, _scaled_arg(d.center)) * Pow(EPS, -(d.order + 1))
        name = "delta" + "'" * d.order
        return EpsNet(expr, f"{name}[{d.center:g}]", d.order + 1, ((d.center, R),))
    if isinstance(d, Sign):
        h = compose(rho.cdf, _scaled_arg(0.0))
        return EpsNet(Const(2.0) * h - 1.0, "sign", 0, ((0.0, R),))
    if isinstance(d, AbsX):
        # |x| * rho_eps = eps * (int |y| rho + int_0^{x/eps} (2 cdf - 1))
        abs_moment = float(integrate(lambda y: np.abs(y) * rho.density(y), -R, R,
                                     np.linspace(-R, R, 9), abs_tol=1e-15)[0])
        prim = Antideriv(Const(2.0) * rho.cdf - 1.0, X * Pow(EPS, -1), origin=0.0)
        return EpsNet(EPS * (prim + abs_moment), "|x|", 0, ((0.0, R),))
    if isinstance(d, Smooth):
        return EpsNet(Convolution(d.expr, rho.pdf, R), d.label, 0)
    if isinstance(d, FiniteSum):
        nets = [_scale(c, embed(t, rho)) for c, t in d.terms]
        return reduce(add, nets) if nets else zero_net()
    raise TypeError(f"cannot embed {type(d).__name__}")


def _scale(c, u):
    return EpsNet(Const(c) * u.expr, f"{c:g}*{u.label}", u.claimed_order, u.features)


def delta_net(rho: Mollifier, center=0.0) -> EpsNet:
    """``x -> rho((x - center)/eps)/eps``."""
    return embed(Dirac(0, center), rho)
