"""Batch checks behind the command-line subcommands.

Every check returns a list of :class:`Row`; a row with ``passed=None`` is
informational and does not affect the exit code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import hilbert_scale as hs
from .asymptotics import GenNumberNet, classify, estimate_order, r_equivalent, valuation
from .epsnet import EPS, Exp, Pow, Sin, X, as_expr, derive, mul, zero_net
from .mollify import (
    AbsX, Dirac, Heaviside, Sign, Smooth, delta_net, embed, make_mollifier,
)
from .pairing import (
    associated, default_test_functions, pair_limit, plateau, rate_probe, schwartz_core,
)

SCHEMA_VERSION = 1
COLUMNS = ("schema_version", "command", "check", "param", "value", "expected", "tolerance", "passed")


@dataclass(frozen=True)
class Row:
    check: str
    param: str
    value: Any
    expected: Any = None
    tolerance: Any = None
    passed: bool | None = None


def _close(value, expected, tol):
    return bool(abs(value - expected) <= tol)


def _kernel(cfg):
    return make_mollifier(cfg.mollifier, cfg.q)


def _tests(cfg):
    tests = default_test_functions()
    if cfg.tests == "extended":
        tests.append(rate_probe())
    return tests


# --- demos ------------------------------------------------------------------------

def demo_schwartz(cfg, **_):
    rows = []
    for kind in ("bump", "gaussian"):
        rho = make_mollifier(kind)
        for e in cfg.ladder.values:
            v = schwartz_core(rho, e)
            rows.append(Row("schwartz_core", f"{kind} eps={e!r}", v, -1.0 / 6.0, 1e-8,
                            _close(v, -1.0 / 6.0, 1e-8)))
    return rows


def demo_association(cfg, **_):
    rho = _kernel(cfg)
    h = embed(Heaviside(), rho)
    h2 = mul(h, h)
    rep = associated(h2, h, _tests(cfg), cfg.ladder)
    rows = []
    for entry in rep.entries:
        rows.append(Row("H^2-H limit", entry.test, entry.limit, 0.0, 1e-6,
                        _close(entry.limit, 0.0, 1e-6)))
        probe = entry.test.startswith("x^2")
        expected = 3.0 if probe else 1.0
        rows.append(Row("H^2-H rate slope", entry.test, entry.rate.slope, expected, 0.1,
                        _close(entry.rate.slope, expected, 0.1)))
    rows.append(Row("associated", rho.kind, rep.verdict, "associated on tested set", None,
                    rep.associated is True))
    eq = r_equivalent(h2, h, [0.0], ladder=cfg.ladder)
    point = eq.points[0].report
    rows.append(Row("r_equivalent slope", "x=0", point.slope, "<= 0.1", 0.1, point.slope <= 0.1))
    rows.append(Row("r_equivalent", "x=0", eq.verdict, "not equivalent", None, not eq.equivalent))
    return rows


def demo_hh_prime(cfg, **_):
    rho = _kernel(cfg)
    h = embed(Heaviside(), rho)
    hp = derive(h)
    psi = plateau(-1.0, 1.0)
    psi0 = float(psi(0.0))
    rows = []
    a = pair_limit(mul(h, hp), psi, cfg.ladder)
    b = pair_limit(mul(mul(h, h), hp), psi, cfg.ladder)
    rows.append(Row("limit H*H'", psi.label, a.limit, psi0 / 2, 1e-6, _close(a.limit, psi0 / 2, 1e-6)))
    rows.append(Row("limit H^2*H'", psi.label, b.limit, psi0 / 3, 1e-6, _close(b.limit, psi0 / 3, 1e-6)))
    rep = associated(mul(h, hp), mul(mul(h, h), hp), [psi], cfg.ladder)
    rows.append(Row("associated", "H*H' vs H^2*H'", rep.verdict, "not associated", None,
                    rep.associated is False))
    return rows


def demo_weak_product(cfg, **_):
    psi = plateau(1.0, 4.0)
    rows = []
    for m, s1, s2, half in hs.weak_product_counterexample([0, 1, 2, 4, 8, 16, 32, 64], psi):
        check = m == 64
        rows.append(Row("<sin(mx),psi>", f"m={m}", s1, 0.0 if check else None,
                        0.01 if check else None, _close(s1, 0.0, 0.01) if check else None))
        rows.append(Row("<sin^2(mx),psi>", f"m={m}", s2, half if check else None,
                        0.01 if check else None, _close(s2, half, 0.01) if check else None))
    uniform = lambda x: np.full(np.shape(x), 1.0 / (2 * math.pi))
    _, s1, s2, _ = hs.weak_product_counterexample([5], uniform)[0]
    rows.append(Row("<sin(mx),1/2pi>", "m=5", s1, 0.0, 1e-12, _close(s1, 0.0, 1e-12)))
    rows.append(Row("<sin^2(mx),1/2pi>", "m=5", s2, 0.5, 1e-12, _close(s2, 0.5, 1e-12)))
    return rows


# --- nets by name -----------------------------------------------------------------

def _named_nets(rho):
    return {
        "zero": (zero_net(), "NegligibleCandidate"),
        "dirac": (delta_net(rho), "Moderate(1)"),
        "dirac-prime": (embed(Dirac(1), rho), "Moderate(2)"),
        "heaviside": (embed(Heaviside(), rho), "Moderate(0)"),
        "heaviside-squared": (mul(embed(Heaviside(), rho), embed(Heaviside(), rho)), "Moderate(0)"),
        "sign": (embed(Sign(), rho), "Moderate(0)"),
        "absx": (embed(AbsX(), rho), "Moderate(0)"),
        "smooth-sin": (embed(Smooth(Sin(X), "sin"), rho), "Moderate(0)"),
    }


NET_NAMES = ("zero", "dirac", "dirac-prime", "heaviside", "heaviside-squared", "sign",
             "absx", "smooth-sin")

NUMBER_NETS = {
    # name: (expression, expected valuation, tolerance)
    "eps2": (EPS**2, 2.0, 0.01),
    "eps3": (EPS**3, 3.0, 0.01),
    "eps2-minus-eps3": (EPS**2 - EPS**3, 2.0, 0.05),
    "const5": (as_expr(5.0), 0.0, 0.01),
    "inv-eps": (Pow(EPS, -1), -1.0, 0.01),
    "exp-neg-inv-eps": (Exp(-Pow(EPS, -1)), math.inf, None),
    "zero": (as_expr(0.0), math.inf, None),
}


def run_classify(cfg, net="dirac", interval=(-1.0, 1.0), **_):
    rho = _kernel(cfg)
    nets = _named_nets(rho)
    if net not in nets:
        raise KeyError(f"unknown net {net!r}; choose from {', '.join(NET_NAMES)}")
    u, expected = nets[net]
    rep = classify(u, interval, cfg.ladder)
    return [
        Row("classification", net, rep.label, expected, None, rep.label == expected),
        Row("slope", net, rep.slope, None, None, None),
        Row("fit_r2", net, rep.fit_r2, None, None, None),
    ]


def run_valuation(cfg, net="eps2", **_):
    if net not in NUMBER_NETS:
        raise KeyError(f"unknown number net {net!r}; choose from {', '.join(NUMBER_NETS)}")
    expr, expected, tol = NUMBER_NETS[net]
    x = GenNumberNet(expr)
    v = valuation(x, cfg.ladder)
    if tol is None:
        # fast decay: anything beyond the moderateness cutoff
        ok = v > 12
        exp_text = "> 12"
    else:
        ok = _close(v, expected, tol)
        exp_text = expected
    rows = [Row("valuation", net, v, exp_text, tol, ok)]
    rep = estimate_order([(e, x.at(e)) for e in cfg.ladder.values])
    rows.append(Row("classification", net, rep.label, None, None, None))
    return rows


# --- Hilbert scale ----------------------------------------------------------------

def scale_check_nuclear(cfg, level=None, **_):
    p = cfg.scale
    levels = range(p.levels - 1) if level is None else [level]
    rows = []
    for n in levels:
        s = hs.nuclear_norm_inclusion(n, p)
        c = hs.nuclear_closed_form(n, p)
        rows.append(Row("nuclear_norm", f"level={n}", s, c, 1e-9, _close(s, c, 1e-9)))
    return rows


def scale_check_product(cfg, level=0, samples=None, **_):
    p = cfg.scale
    rng = np.random.default_rng(cfg.seed)
    n_pairs = samples or cfg.samples
    margins = []
    for _ in range(n_pairs):
        u = hs.random_element(rng, level, p)
        v = hs.random_element(rng, level, p)
        margins.append(hs.check_product(u, v, level, p).margin)
    margins = np.array(margins)
    violations = int(np.sum(margins < -hs.MARGIN_SLACK))
    return [
        Row("product_bound_constant", f"level={level}", hs.product_bound(level, p), None, None, None),
        Row("min_margin", f"pairs={n_pairs}", float(margins.min()), ">= -1e-12", hs.MARGIN_SLACK,
            violations == 0),
        Row("violations", f"pairs={n_pairs}", violations, 0, None, violations == 0),
    ]


def scale_check_derivative(cfg, level=0, samples=None, **_):
    p = cfg.scale
    const, kmax = hs.derivative_bound(level, p)
    rows = [Row("derivative_bound_constant", f"level={level} argmax_k={kmax}", const, None, None, None)]
    basis_margins = []
    for k in range(0, p.truncation + 1):
        rep = hs.check_derivative(hs.SpectralElement.basis(k, p.truncation), level, p)
        basis_margins.append(rep.margin)
        if k == kmax:
            tight = abs(rep.value - rep.bound) <= 1e-12 * max(rep.bound, 1.0)
            rows.append(Row("equality_at_argmax", f"k={k}", rep.value, rep.bound, 1e-12, tight))
    rows.append(Row("basis_min_margin", f"k=0..{p.truncation}", float(min(basis_margins)), ">= -1e-12",
                    hs.MARGIN_SLACK, min(basis_margins) >= -hs.MARGIN_SLACK))
    rng = np.random.default_rng(cfg.seed + 1)
    n = samples or cfg.samples
    margins = [hs.check_derivative(hs.random_element(rng, level, p), level, p).margin for _ in range(n)]
    rows.append(Row("random_min_margin", f"elements={n}", float(min(margins)), ">= -1e-12",
                    hs.MARGIN_SLACK, min(margins) >= -hs.MARGIN_SLACK))
    return rows


def scale_weak_strong(cfg, level=1, m_max=20, **_):
    p = cfg.scale
    seq = hs.weak_strong_demo(m_max, level, 1.0, p)
    rows = [Row("norm", f"m={m}", v, None, None, None) for m, v in seq]
    vals = [v for _, v in seq]
    rows.append(Row("strictly_decreasing", f"m=1..{m_max}", all(b < a for a, b in zip(vals, vals[1:])),
                    True, None, all(b < a for a, b in zip(vals, vals[1:]))))
    tail = max(v for m, v in seq if m >= 8)
    rows.append(Row("max_norm_m_ge_8", f"level={level}", tail, "< 1e-6", 1e-6, tail < 1e-6))
    top = max(vals)
    rows.append(Row("uniform_bound", f"level={level}", top, "<= 0.7072", 0.7072, top <= 0.7072))
    return rows


def scale_compact_rank(cfg, level=0, delta=1e-8, family_size=64, **_):
    p = cfg.scale
    m = hs.compact_rank(level, delta, p)
    d = p.gap(level)
    certified = math.exp(-d * m) <= delta and (m == 0 or not math.exp(-d * (m - 1)) <= delta)
    rows = [Row("rank", f"level={level} delta={delta!r}", m, "minimal m: exp(-d m) <= delta", None,
                certified)]
    family = [hs.mollified_embed(Smooth(Sin(X * float(k))), 1.0, p) for k in range(1, family_size + 1)]
    bound = max(hs.norm(u, level, p) for u in family)
    err = max(hs.projection_error(u, m, level + 1, p) for u in family)
    rows.append(Row("family_sup_norm", f"level={level}", bound, None, None, None))
    rows.append(Row("family_projection_error", f"level={level + 1} rank={hs.truncation_rank(m)}", err,
                    f"<= {delta!r}", delta, err <= delta))
    return rows


COMMANDS = {
    "demo-schwartz": demo_schwartz,
    "demo-association": demo_association,
    "demo-weak-product": demo_weak_product,
    "demo-hh-prime": demo_hh_prime,
    "classify": run_classify,
    "valuation": run_valuation,
    "scale-check-nuclear": scale_check_nuclear,
    "scale-check-product": scale_check_product,
    "scale-check-derivative": scale_check_derivative,
    "scale-weak-strong": scale_weak_strong,
    "scale-compact-rank": scale_compact_rank,
}
