"""Pairing nets with test functions, eps -> 0 limits and association."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .asymptotics import INDETERMINATE, NEGLIGIBLE, DecayReport, EpsLadder, estimate_order
from .epsnet import Const, EpsNet, SmoothExpr, X, as_expr, compose, derive, mul, sub
from .mollify import Heaviside, Mollifier, embed, make_mollifier
from .quadrature import integrate

__all__ = [
    "PAIR_TOL", "ASSOCIATION_TOL", "TestFunction", "plateau", "default_test_functions",
    "rate_probe", "pair", "line_integral", "PairLimit", "pair_limit",
    "AssociationReport", "associated", "schwartz_core",
]

PAIR_TOL = 1e-10
ASSOCIATION_TOL = 1e-6
MAX_PANELS = 2**16
STABILITY_TOL = 1e-3


@dataclass(frozen=True)
class TestFunction:
    """Smooth, compactly supported, eps-free function."""

    __test__ = False  # not a pytest class

    expr: SmoothExpr
    support: tuple
    label: str = "psi"

    def __post_init__(self):
        expr = as_expr(self.expr)
        if expr.has_eps:
            raise ValueError("test functions must not depend on eps")
        a, b = float(self.support[0]), float(self.support[1])
        if not a < b:
            raise ValueError(f"bad support [{a}, {b}]")
        object.__setattr__(self, "expr", expr)
        object.__setattr__(self, "support", (a, b))
        w = b - a
        probe = np.array([a, b, a - 1e-3 * w, b + 1e-3 * w, a - w, b + w])
        if np.max(np.abs(expr.evaluate(1.0, probe))) > 1e-14:
            raise ValueError(f"{self.label} does not vanish outside [{a}, {b}]")

    def __call__(self, x):
        return self.expr.evaluate(1.0, x)

    def integral(self):
        a, b = self.support
        return float(integrate(self, a, b, np.linspace(a, b, 9), abs_tol=1e-13)[0])


@lru_cache(maxsize=None)
def _smooth_step():
    # 0 below -1, 1 above 1
    return make_mollifier("bump").cdf


def plateau(a, b, ramp=0.25, label=None) -> TestFunction:
    """Test function supported on ``[a, b]``, equal to 1 on ``[a+2*ramp, b-2*ramp]``."""
    if b - a < 4 * ramp:
        raise ValueError("support too short for the ramps")
    step = _smooth_step()
    rise = compose(step, (X - (a + ramp)) * (1.0 / ramp))
    fall = compose(step, (X - (b - ramp)) * (1.0 / ramp))
    return TestFunction(rise - fall, (a, b), label or f"plateau[{a:g},{b:g}]")


def default_test_functions():
    return [plateau(-1.0, 1.0), plateau(-0.5, 2.0), plateau(-3.0, 0.25)]


def rate_probe():
    """Test function with psi(0) = 0: psi = x^2 * plateau[-1, 1]."""
    base = plateau(-1.0, 1.0)
    return TestFunction(X * X * base.expr, base.support, "x^2*plateau[-1,1]")


def _seeds(u: EpsNet, eps):
    pts = []
    for center, radius in u.features:
        pts.extend(center + eps * radius * np.arange(-8, 9) / 8.0)
    return pts


def line_integral(u: EpsNet, eps, a, b, abs_tol=PAIR_TOL, max_panels=MAX_PANELS):
    """``int_a^b u_eps(x) dx`` with breakpoints at the net's concentration points."""
    f = lambda x: u.expr.evaluate(eps, x)
    return float(integrate(f, a, b, _seeds(u, eps), abs_tol, max_panels)[0])


def pair(u: EpsNet, psi: TestFunction, eps, abs_tol=PAIR_TOL, max_panels=MAX_PANELS) -> float:
    """``<u_eps, psi>`` by adaptive quadrature over the support of ``psi``.

    Raises :class:`~colombeau.quadrature.QuadratureError` if the panel
    budget runs out.
    """
    if not 0.0 < eps <= 1.0:
        from .epsnet import DomainError
        raise DomainError(f"eps must lie in (0, 1], got {eps!r}")
    prod = u.expr * psi.expr
    a, b = psi.support
    f = lambda x: prod.evaluate(eps, x)
    return float(integrate(f, a, b, _seeds(u, eps), abs_tol, max_panels)[0])


@dataclass(frozen=True)
class PairLimit:
    limit: float
    rate: DecayReport
    status: str = "ok"
    exponent: float = math.nan
    pairings: tuple = field(default=(), repr=False)

    @property
    def indeterminate(self):
        return self.status == INDETERMINATE


def pair_limit(u: EpsNet, psi: TestFunction, ladder: EpsLadder | None = None,
               abs_tol=PAIR_TOL) -> PairLimit:
    """Estimate ``lim <u_eps, psi>`` as eps -> 0.

    The convergence exponent is fitted on successive differences of the
    pairings and used for a Richardson step on the two smallest ladder
    entries.  Differences below the quadrature tolerance count as converged.
    """
    ladder = ladder or EpsLadder()
    eps = ladder.values
    p = np.array([pair(u, psi, e, abs_tol) for e in eps])
    pairings = tuple(zip(eps, p.tolist()))
    last, prev = p[-1], p[-2]
    if abs(last - prev) > STABILITY_TOL * max(1.0, abs(last)):
        rate = estimate_order([(e, v - last) for e, v in pairings])
        return PairLimit(float(last), rate, INDETERMINATE, math.nan, pairings)
    diffs = np.abs(np.diff(p))
    diffs = np.where(diffs < abs_tol, 0.0, diffs)
    exponent = math.nan
    limit = float(last)
    if np.any(diffs[len(diffs) // 2:] > 0):
        d_rep = estimate_order(list(zip(eps[1:], diffs.tolist())))
        exponent = d_rep.slope
        if math.isfinite(exponent) and exponent > 0:
            rb = ladder.ratio**exponent
            limit = float(last - (prev - last) * rb / (1.0 - rb))
    resid = np.abs(p - limit)
    resid = np.where(resid < abs_tol, 0.0, resid)
    rate = estimate_order(list(zip(eps, resid.tolist())))
    return PairLimit(limit, rate, "ok", exponent, pairings)


@dataclass(frozen=True)
class AssociationEntry:
    test: str
    limit: float
    rate: DecayReport
    status: str


@dataclass(frozen=True)
class AssociationReport:
    entries: tuple
    tolerance: float = ASSOCIATION_TOL

    @property
    def associated(self):
        """True/False, or None if some pairing limit was indeterminate."""
        if any(e.status == INDETERMINATE for e in self.entries):
            return None
        return all(abs(e.limit) <= self.tolerance for e in self.entries)

    @property
    def verdict(self):
        a = self.associated
        if a is None:
            return "indeterminate"
        return "associated on tested set" if a else "not associated"


def associated(u: EpsNet, v: EpsNet, tests: Sequence[TestFunction] | None = None,
               ladder: EpsLadder | None = None, tol=ASSOCIATION_TOL) -> AssociationReport:
    """Check ``lim <u_eps - v_eps, psi> = 0`` on a finite set of test functions.

    A finite set can refute association but only supports it, hence the
    verdict wording.
    """
    tests = default_test_functions() if tests is None else list(tests)
    if not tests:
        raise ValueError("need at least one test function")
    diff = sub(u, v)
    entries = []
    for psi in tests:
        lim = pair_limit(diff, psi, ladder)
        entries.append(AssociationEntry(psi.label, lim.limit, lim.rate, lim.status))
    return AssociationReport(tuple(entries), tol)


def schwartz_core(rho: Mollifier, eps, abs_tol=1e-12) -> float:
    """``int (H_eps^2 - H_eps) H_eps' dx``; equals -1/6 for every eps."""
    h = embed(Heaviside(), rho)
    integrand = mul(sub(mul(h, h), h), derive(h))
    r = rho.effective_radius * eps
    return line_integral(integrand, eps, -r, r, abs_tol)
