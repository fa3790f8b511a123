"""Expression trees for epsilon-nets of smooth functions of one variable.

A :class:`SmoothExpr` is an immutable tree over the variable ``x`` and the
regularization parameter ``eps``.  Trees are differentiated symbolically in
``x`` and evaluated with numpy broadcasting; shared subtrees are evaluated
once per call.  An :class:`EpsNet` wraps a tree as a representative of a
generalized function.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import special

from .quadrature import panel_integrals

__all__ = [
    "DomainError", "SmoothExpr", "Const", "X", "EPS", "Add", "Mul", "Div",
    "Pow", "Exp", "Sin", "Cos", "Erf", "Bump", "Antideriv", "Convolution",
    "as_expr", "compose", "EpsNet", "add", "mul", "neg", "sub", "derive",
    "evaluate", "sup_on", "zero_net", "one_net", "constant_net", "x_net",
]

ANTIDERIV_TOL = 1e-12
CONVOLUTION_TOL = 1e-13
_CACHE_LIMIT = 400_000


class DomainError(ValueError):
    pass


def _check_eps(eps):
    if not (0.0 < eps <= 1.0):
        raise DomainError(f"eps must lie in (0, 1], got {eps!r}")


class SmoothExpr:
    """Base node.  Subclasses implement ``_compute`` and ``_derive``."""

    __slots__ = ("has_x", "has_eps")

    def evaluate(self, eps, x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(_ev(self, float(eps), x, {}), dtype=float)
        if out.shape != x.shape:
            out = np.array(np.broadcast_to(out, x.shape))
        return out

    def derive(self):
        return _d(self, {})

    def __add__(self, other):
        return _add(self, as_expr(other))

    __radd__ = __add__

    def __mul__(self, other):
        return _mul(self, as_expr(other))

    __rmul__ = __mul__

    def __neg__(self):
        return _mul(Const(-1.0), self)

    def __sub__(self, other):
        return _add(self, -as_expr(other))

    def __rsub__(self, other):
        return _add(as_expr(other), -self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __pow__(self, n):
        return Pow(self, n)


def _ev(node, eps, x, memo):
    key = id(node)
    try:
        return memo[key]
    except KeyError:
        val = node._compute(eps, x, memo)
        memo[key] = val
        return val


def _d(node, memo):
    key = id(node)
    try:
        return memo[key]
    except KeyError:
        val = node._derive(memo)
        memo[key] = val
        return val


class Const(SmoothExpr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = float(value)
        self.has_x = self.has_eps = False

    def _compute(self, eps, x, memo):
        return self.value

    def _derive(self, memo):
        return ZERO

    def __repr__(self):
        return f"Const({self.value!r})"


class _Var(SmoothExpr):
    __slots__ = ()

    def __init__(self):
        self.has_x, self.has_eps = True, False

    def _compute(self, eps, x, memo):
        return x

    def _derive(self, memo):
        return ONE

    def __repr__(self):
        return "X"


class _Param(SmoothExpr):
    __slots__ = ()

    def __init__(self):
        self.has_x, self.has_eps = False, True

    def _compute(self, eps, x, memo):
        return eps

    def _derive(self, memo):
        return ZERO

    def __repr__(self):
        return "EPS"


ZERO = Const(0.0)
ONE = Const(1.0)
X = _Var()
EPS = _Param()


def as_expr(v):
    if isinstance(v, SmoothExpr):
        return v
    if isinstance(v, (int, float, np.floating, np.integer)):
        return Const(v)
    raise TypeError(f"cannot build an expression from {type(v).__name__}")


def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


class _Binary(SmoothExpr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b
        self.has_x = a.has_x or b.has_x
        self.has_eps = a.has_eps or b.has_eps

    def __repr__(self):
        return f"{type(self).__name__}({self.a!r}, {self.b!r})"


class Add(_Binary):
    __slots__ = ()

    def _compute(self, eps, x, memo):
        return _ev(self.a, eps, x, memo) + _ev(self.b, eps, x, memo)

    def _derive(self, memo):
        return _add(_d(self.a, memo), _d(self.b, memo))


class Mul(_Binary):
    __slots__ = ()

    def _compute(self, eps, x, memo):
        return _ev(self.a, eps, x, memo) * _ev(self.b, eps, x, memo)

    def _derive(self, memo):
        return _add(_mul(_d(self.a, memo), self.b), _mul(self.a, _d(self.b, memo)))


class Div(_Binary):
    """Quotient; the denominator must not vanish for eps in (0, 1]."""

    __slots__ = ()

    def _compute(self, eps, x, memo):
        return _ev(self.a, eps, x, memo) / _ev(self.b, eps, x, memo)

    def _derive(self, memo):
        da, db = _d(self.a, memo), _d(self.b, memo)
        if _is_const(db, 0.0):
            return _div(da, self.b)
        num = _add(_mul(da, self.b), -_mul(self.a, db))
        return _div(num, Pow(self.b, 2))


def _add(a, b):
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    return Add(a, b)


def _mul(a, b):
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    return Mul(a, b)


def _div(a, b):
    if _is_const(a, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    return Div(a, b)


class Pow(SmoothExpr):
    """Integer power.  Negative exponents need a nonvanishing base."""

    __slots__ = ("base", "n")

    def __init__(self, base, n):
        if int(n) != n:
            raise TypeError("Pow takes an integer exponent")
        self.base, self.n = as_expr(base), int(n)
        self.has_x, self.has_eps = self.base.has_x, self.base.has_eps

    def _compute(self, eps, x, memo):
        b = _ev(self.base, eps, x, memo)
        if self.n < 0:
            return 1.0 / np.power(b, -self.n)
        return np.power(b, self.n)

    def _derive(self, memo):
        if self.n == 0:
            return ZERO
        db = _d(self.base, memo)
        lower = ONE if self.n == 1 else Pow(self.base, self.n - 1)
        return _mul(_mul(Const(self.n), lower), db)

    def __repr__(self):
        return f"Pow({self.base!r}, {self.n})"


class _Unary(SmoothExpr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = as_expr(a)
        self.has_x, self.has_eps = self.a.has_x, self.a.has_eps

    def __repr__(self):
        return f"{type(self).__name__}({self.a!r})"


class Exp(_Unary):
    __slots__ = ()

    def _compute(self, eps, x, memo):
        return np.exp(_ev(self.a, eps, x, memo))

    def _derive(self, memo):
        return _mul(self, _d(self.a, memo))


class Sin(_Unary):
    __slots__ = ()

    def _compute(self, eps, x, memo):
        return np.sin(_ev(self.a, eps, x, memo))

    def _derive(self, memo):
        return _mul(Cos(self.a), _d(self.a, memo))


class Cos(_Unary):
    __slots__ = ()

    def _compute(self, eps, x, memo):
        return np.cos(_ev(self.a, eps, x, memo))

    def _derive(self, memo):
        return _mul(-Sin(self.a), _d(self.a, memo))


class Erf(_Unary):
    __slots__ = ()

    def _compute(self, eps, x, memo):
        return special.erf(_ev(self.a, eps, x, memo))

    def _derive(self, memo):
        gauss = Exp(_mul(Const(-1.0), Pow(self.a, 2)))
        return _mul(_mul(Const(2.0 / math.sqrt(math.pi)), gauss), _d(self.a, memo))


class Bump(SmoothExpr):
    """``exp(-1/(1-a^2)) * (1-a^2)^(-p)`` for ``|a| < 1``, zero elsewhere.

    The family is closed under differentiation, which keeps compactly
    supported kernels inside the node set.
    """

    __slots__ = ("a", "p")

    def __init__(self, a, p=0):
        self.a, self.p = as_expr(a), int(p)
        self.has_x, self.has_eps = self.a.has_x, self.a.has_eps

    def _compute(self, eps, x, memo):
        a = np.asarray(_ev(self.a, eps, x, memo), dtype=float)
        t = 1.0 - a * a
        inside = t > 0
        ts = np.where(inside, t, 1.0)
        val = np.exp(-1.0 / ts - self.p * np.log(ts))
        return np.where(inside, val, 0.0)

    def _derive(self, memo):
        # d/da B_p(a) = 2a (p B_{p+1}(a) - B_{p+2}(a))
        inner = _add(_mul(Const(self.p), Bump(self.a, self.p + 1)), -Bump(self.a, self.p + 2))
        return _mul(_mul(_mul(Const(2.0), self.a), inner), _d(self.a, memo))

    def __repr__(self):
        return f"Bump({self.a!r}, {self.p})"


class Antideriv(SmoothExpr):
    """Primitive ``offset + int_origin^arg p(t) dt`` of an x-only integrand.

    ``support`` (if given) is an interval outside which ``p`` vanishes, so
    arguments are clipped to it.  Values are computed by adaptive quadrature
    and cached per argument value.
    """

    __slots__ = ("integrand", "arg", "origin", "support", "offset", "upper_value",
                 "_scale", "_cache", "_lock")

    def __init__(self, integrand, arg=None, origin=0.0, support=None, offset=0.0,
                 upper_value=None):
        integrand = as_expr(integrand)
        if integrand.has_eps:
            raise ValueError("antiderivative integrand must not depend on eps")
        self.integrand = integrand
        self.arg = X if arg is None else as_expr(arg)
        self.origin = float(origin)
        self.support = None if support is None else (float(support[0]), float(support[1]))
        self.offset = float(offset)
        if upper_value is not None and (self.support is None or self.origin != self.support[0]):
            raise ValueError("upper_value needs a support starting at the origin")
        # total mass rescaled so the primitive is exactly upper_value past the support
        self.upper_value = upper_value
        self._scale = None
        self._cache = {}
        self._lock = threading.Lock()
        self.has_x, self.has_eps = self.arg.has_x, self.arg.has_eps

    def with_arg(self, arg):
        node = Antideriv.__new__(Antideriv)
        node.integrand, node.origin = self.integrand, self.origin
        node.support, node.offset = self.support, self.offset
        node.upper_value, node._scale = self.upper_value, self._scale
        node.arg = arg
        # the primitive is the same function; share its cache
        node._cache, node._lock = self._cache, self._lock
        node.has_x, node.has_eps = arg.has_x, arg.has_eps
        return node

    def primitive(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        if self.support is not None:
            flat = np.clip(flat, *self.support)
        uniq, inv = np.unique(flat, return_inverse=True)
        cache = self._cache
        with self._lock:
            got = [cache.get(v) for v in uniq.tolist()]
        missing = np.array([v for v, g in zip(uniq.tolist(), got) if g is None])
        if missing.size:
            new = self._integrate(missing)
            with self._lock:
                if len(cache) > _CACHE_LIMIT:
                    cache.clear()
                cache.update(zip(missing.tolist(), new.tolist()))
            lookup = dict(zip(missing.tolist(), new.tolist()))
            got = [g if g is not None else lookup[v] for v, g in zip(uniq.tolist(), got)]
        vals = np.asarray(got, dtype=float)[inv]
        if self.upper_value is not None:
            if self._scale is None:
                total = self._integrate(np.array([self.support[1]]))[0]
                self._scale = self.upper_value / total
            vals = np.where(flat >= self.support[1], self.upper_value, vals * self._scale)
        return vals.reshape(t.shape) + self.offset

    def _integrate(self, ts):
        f = lambda s: self.integrand.evaluate(1.0, s)
        out = np.zeros(ts.size)
        # ts is sorted and unique; walk outward from the origin on each side
        right = ts > self.origin
        if right.any():
            parts, _ = panel_integrals(f, np.concatenate([[self.origin], ts[right]]), ANTIDERIV_TOL)
            out[right] = np.cumsum(parts)
        left = ts < self.origin
        if left.any():
            pts = ts[left][::-1]
            parts, _ = panel_integrals(f, np.concatenate([[self.origin], pts]), ANTIDERIV_TOL)
            out[left] = np.cumsum(parts)[::-1]
        return out

    def _compute(self, eps, x, memo):
        return self.primitive(_ev(self.arg, eps, x, memo))

    def _derive(self, memo):
        return _mul(compose(self.integrand, self.arg), _d(self.arg, memo))

    def __repr__(self):
        return f"Antideriv({self.integrand!r}, {self.arg!r}, origin={self.origin})"


class Convolution(SmoothExpr):
    """``(f * rho_eps)(arg)`` = ``int f(arg - eps*y) rho(y) dy`` over ``|y| <= radius``."""

    __slots__ = ("f", "kernel", "radius", "arg")

    def __init__(self, f, kernel, radius, arg=None):
        f, kernel = as_expr(f), as_expr(kernel)
        if f.has_eps or kernel.has_eps:
            raise ValueError("convolution operands must not depend on eps")
        self.f, self.kernel, self.radius = f, kernel, float(radius)
        self.arg = X if arg is None else as_expr(arg)
        self.has_x, self.has_eps = self.arg.has_x, True

    def _compute(self, eps, x, memo):
        t = np.asarray(_ev(self.arg, eps, x, memo), dtype=float)
        shape = t.shape
        uniq, inv = np.unique(t.ravel(), return_inverse=True)

        def integrand(y):
            pts = uniq[None, :] - eps * y[:, None]
            return self.f.evaluate(1.0, pts) * self.kernel.evaluate(1.0, y)[:, None]

        r = self.radius
        edges = np.linspace(-r, r, 9)
        parts, _ = panel_integrals(integrand, edges, CONVOLUTION_TOL)
        return parts.sum(axis=0)[inv].reshape(shape)

    def _derive(self, memo):
        inner = Convolution(_d(self.f, {}), self.kernel, self.radius, self.arg)
        return _mul(inner, _d(self.arg, memo))

    def __repr__(self):
        return f"Convolution({self.f!r}, {self.kernel!r}, {self.radius})"


def compose(expr, arg):
    """Substitute ``arg`` for ``X`` throughout ``expr``."""
    arg = as_expr(arg)
    return _compose(expr, arg, {})


def _compose(e, arg, memo):
    key = id(e)
    if key in memo:
        return memo[key]
    if e is X:
        out = arg
    elif isinstance(e, (Const, _Param)):
        out = e
    elif isinstance(e, Add):
        out = _add(_compose(e.a, arg, memo), _compose(e.b, arg, memo))
    elif isinstance(e, Mul):
        out = _mul(_compose(e.a, arg, memo), _compose(e.b, arg, memo))
    elif isinstance(e, Div):
        out = _div(_compose(e.a, arg, memo), _compose(e.b, arg, memo))
    elif isinstance(e, Pow):
        out = Pow(_compose(e.base, arg, memo), e.n)
    elif isinstance(e, Bump):
        out = Bump(_compose(e.a, arg, memo), e.p)
    elif isinstance(e, _Unary):
        out = type(e)(_compose(e.a, arg, memo))
    elif isinstance(e, Antideriv):
        out = e.with_arg(_compose(e.arg, arg, memo))
    elif isinstance(e, Convolution):
        out = Convolution(e.f, e.kernel, e.radius, _compose(e.arg, arg, memo))
    else:
        raise TypeError(f"unknown node {type(e).__name__}")
    memo[key] = out
    return out


@dataclass(frozen=True)
class EpsNet:
    """Representative ``eps -> u_eps`` of a generalized function.

    ``features`` lists ``(center, radius)`` pairs: places where the net
    concentrates on a window of half-width ``radius * eps``.  Quadrature and
    sup-norm sampling seed extra points there.
    """

    expr: SmoothExpr
    label: str = ""
    claimed_order: int | None = None
    features: tuple = field(default=())

    def __post_init__(self):
        if not isinstance(self.expr, SmoothExpr):
            object.__setattr__(self, "expr", as_expr(self.expr))

    def evaluate(self, eps, x):
        return evaluate(self, eps, x)

    __call__ = evaluate

    def __add__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return neg(self)

    def __sub__(self, other):
        return sub(self, other)

    def derive(self):
        return derive(self)


def _merge(u, v):
    return tuple(dict.fromkeys(u.features + v.features))


def _as_net(v):
    if isinstance(v, EpsNet):
        return v
    return constant_net(v)


def add(u, v):
    u, v = _as_net(u), _as_net(v)
    return EpsNet(u.expr + v.expr, f"({u.label} + {v.label})", None, _merge(u, v))


def mul(u, v):
    u, v = _as_net(u), _as_net(v)
    return EpsNet(u.expr * v.expr, f"({u.label} * {v.label})", None, _merge(u, v))


def neg(u):
    return EpsNet(-u.expr, f"-{u.label}", u.claimed_order, u.features)


def sub(u, v):
    return add(u, neg(_as_net(v)))


def derive(u):
    return EpsNet(u.expr.derive(), f"d({u.label})", None, u.features)


def evaluate(u, eps, x):
    """Value of the net at parameter ``eps`` and point(s) ``x``."""
    _check_eps(eps)
    expr = u.expr if isinstance(u, EpsNet) else as_expr(u)
    out = expr.evaluate(eps, x)
    return float(out) if np.ndim(out) == 0 else out


def zero_net():
    return EpsNet(ZERO, "0")


def one_net():
    return EpsNet(ONE, "1")


def constant_net(c):
    return EpsNet(Const(c), repr(float(c)))


def x_net():
    return EpsNet(X, "x")


def _feature_points(u, lo, hi, eps):
    pts = []
    for center, radius in u.features:
        local = center + eps * radius * np.linspace(-1.25, 1.25, 257)
        pts.append(local[(local >= lo) & (local <= hi)])
    return pts


def sup_on(u, interval: Sequence[float], eps, grid_n=1000, rtol=1e-10):
    """Max of ``|u_eps|`` on a closed interval.

    Starts from a uniform grid (plus fine local grids at the net's
    concentration points) and zooms in on the maximizer until the value is
    stable to ``rtol``.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo <= hi:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    _check_eps(eps)
    xs = np.unique(np.concatenate([np.linspace(lo, hi, grid_n)] + _feature_points(u, lo, hi, eps)))
    vals = np.abs(u.expr.evaluate(eps, xs))
    i = int(np.argmax(vals))
    best = float(vals[i])
    left, right = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
    for _ in range(200):
        if right <= left:
            break
        zs = np.linspace(left, right, 21)
        zv = np.abs(u.expr.evaluate(eps, zs))
        j = int(np.argmax(zv))
        new = max(best, float(zv[j]))
        stable = abs(new - best) <= rtol * max(new, 1e-300)
        best = new
        left, right = zs[max(j - 1, 0)], zs[min(j + 1, zs.size - 1)]
        if stable and (right - left) < 1e-6 * max(hi - lo, 1e-300):
            break
    return best
