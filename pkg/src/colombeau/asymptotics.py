"""Asymptotic order of nets as eps -> 0.

Values sampled on a geometric ladder of eps are fitted by least squares in
log-log coordinates.  Moderateness and negligibility use the polynomial
scale: a net is moderate if it is O(eps^-N) for some N and negligible if it
is O(eps^N) for every N.  Numerically negligibility can only be suggested,
so the strongest verdict is ``NegligibleCandidate``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .epsnet import EPS, EpsNet, SmoothExpr, as_expr, evaluate, sup_on

__all__ = [
    "N_MAX", "ZERO_THRESHOLD", "EpsLadder", "DecayReport", "GenNumberNet",
    "estimate_order", "classify", "valuation", "sharp_distance",
    "PointEquivalence", "EquivalenceReport", "r_equivalent",
]

N_MAX = 12
ZERO_THRESHOLD = 1e-300
SLOPE_TOL = 0.05

MODERATE = "Moderate"
NEGLIGIBLE = "NegligibleCandidate"
DIVERGENT = "Divergent"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class EpsLadder:
    eps0: float = 0.25
    ratio: float = 0.5
    count: int = 12

    def __post_init__(self):
        if not 0.0 < self.eps0 <= 1.0:
            raise ValueError("eps0 must lie in (0, 1]")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("ratio must lie in (0, 1)")
        if self.count < 6:
            raise ValueError("ladder needs at least 6 entries")

    @property
    def values(self):
        return [self.eps0 * self.ratio**j for j in range(self.count)]

    def halved(self):
        return EpsLadder(self.eps0 / 2, self.ratio, self.count)


@dataclass(frozen=True)
class DecayReport:
    slope: float
    intercept: float
    fit_r2: float
    classification: str
    order: int | None = None
    samples: tuple = field(default=(), repr=False)

    @property
    def label(self):
        if self.order is None:
            return self.classification
        return f"{self.classification}({self.order})"

    def as_dict(self):
        return {"slope": self.slope, "intercept": self.intercept, "fit_r2": self.fit_r2,
                "classification": self.label}


def _classify_slope(slope):
    if math.isnan(slope):
        return INDETERMINATE, None
    if slope > N_MAX:
        return NEGLIGIBLE, None
    if slope <= -N_MAX:
        return DIVERGENT, math.ceil(-slope - SLOPE_TOL)
    return MODERATE, max(0, math.ceil(-slope - SLOPE_TOL))


def estimate_order(samples: Sequence[tuple[float, float]]) -> DecayReport:
    """Fit ``|value| ~ C eps^b`` over the smallest-eps half of the samples.

    Values below ``ZERO_THRESHOLD`` count as exact zeros and are left out of
    the regression.  All-zero input, or zeros at the small-eps end with too
    few nonzero samples left to fit, is reported as ``NegligibleCandidate``
    with slope ``+inf``.
    """
    pts = sorted(((float(e), abs(float(v))) for e, v in samples), key=lambda p: -p[0])
    frozen = tuple(pts)
    nonzero = [(e, v) for e, v in pts if v >= ZERO_THRESHOLD]
    if not nonzero:
        return DecayReport(math.inf, math.nan, 0.0, NEGLIGIBLE, None, frozen)
    smallest_nonzero = nonzero[-1][0]
    underflow = any(v < ZERO_THRESHOLD and e < smallest_nonzero for e, v in pts)
    if len(nonzero) < 4:
        if underflow:
            return DecayReport(math.inf, math.nan, 0.0, NEGLIGIBLE, None, frozen)
        return DecayReport(math.nan, math.nan, 0.0, INDETERMINATE, None, frozen)
    k = max(4, math.ceil(len(nonzero) / 2))
    tail = nonzero[-k:]
    lx = np.log([e for e, _ in tail])
    ly = np.log([v for _, v in tail])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot <= 1e-24 * len(ly) else max(0.0, 1.0 - ss_res / ss_tot)
    cls, order = _classify_slope(float(slope))
    return DecayReport(float(slope), float(intercept), r2, cls, order, frozen)


def classify(u: EpsNet, interval=(-1.0, 1.0), ladder: EpsLadder | None = None,
             grid_n=1000) -> DecayReport:
    """Moderateness report for the sup-norms of ``u`` on a compact interval."""
    ladder = ladder or EpsLadder()
    samples = [(e, sup_on(u, interval, e, grid_n)) for e in ladder.values]
    return estimate_order(samples)


@dataclass(frozen=True)
class GenNumberNet:
    """Net of scalars ``eps -> x_eps`` (a representative of a generalized number)."""

    expr: SmoothExpr

    def __post_init__(self):
        e = as_expr(self.expr)
        if e.has_x:
            raise ValueError("a generalized number must not depend on x")
        object.__setattr__(self, "expr", e)

    def at(self, eps):
        return float(evaluate(self.expr, eps, 0.0))

    def __sub__(self, other):
        return GenNumberNet(self.expr - other.expr)

    @classmethod
    def power(cls, b, c=1.0):
        return cls(as_expr(c) * EPS**b)


def valuation(xnet: GenNumberNet, ladder: EpsLadder | None = None) -> float:
    """Estimated exponent ``b`` with ``|x_eps| ~ eps^b``; ``+inf`` for zero nets."""
    ladder = ladder or EpsLadder()
    rep = estimate_order([(e, xnet.at(e)) for e in ladder.values])
    if rep.classification == NEGLIGIBLE and math.isinf(rep.slope):
        return math.inf
    return rep.slope


def sharp_distance(x: GenNumberNet, y: GenNumberNet, ladder: EpsLadder | None = None) -> float:
    v = valuation(x - y, ladder)
    return 0.0 if math.isinf(v) and v > 0 else math.exp(-v)


@dataclass(frozen=True)
class PointEquivalence:
    point: float
    report: DecayReport

    @property
    def negligible(self):
        return self.report.classification == NEGLIGIBLE


@dataclass(frozen=True)
class EquivalenceReport:
    points: tuple

    @property
    def equivalent(self):
        return all(p.negligible for p in self.points)

    @property
    def verdict(self):
        return "equivalent" if self.equivalent else "not equivalent"


def r_equivalent(u: EpsNet, v: EpsNet, points: Sequence[float], rho=None,
                 ladder: EpsLadder | None = None) -> EquivalenceReport:
    """Pointwise test of the algebra's equivalence relation.

    For each point the difference ``u_eps(x) - v_eps(x)`` is tracked along
    the ladder; the nets are equivalent on the tested points iff every
    difference decays faster than any power of eps.  With a mollifier
    ``rho`` the difference is first averaged against ``rho_{eps,x}``
    instead of read off pointwise.
    """
    if len(points) == 0:
        raise ValueError("need at least one point")
    ladder = ladder or EpsLadder()
    diff = u - v
    out = []
    for x0 in points:
        if rho is None:
            samples = [(e, evaluate(diff, e, float(x0))) for e in ladder.values]
        else:
            samples = [(e, _smeared(diff, rho, e, float(x0))) for e in ladder.values]
        out.append(PointEquivalence(float(x0), estimate_order(samples)))
    return EquivalenceReport(tuple(out))


def _smeared(u, rho, eps, x0):
    from .quadrature import integrate

    r = rho.effective_radius
    f = lambda s: u.expr.evaluate(eps, x0 - eps * s) * rho.density(s)
    return float(integrate(f, -r, r, np.linspace(-r, r, 9), abs_tol=1e-13)[0])
