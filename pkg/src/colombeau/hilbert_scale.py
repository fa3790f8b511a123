"""A weighted Fourier scale of Hilbert spaces on the torus.

Level ``n`` carries the norm ``||u||_n^2 = sum_k exp(2 a_n |k|) |c_k|^2`` with
``a_n = a0 * 2^-n``.  The inclusion ``H_n -> H_{n+1}`` is diagonal with
singular values ``exp(-d_n |k|)``, ``d_n = a_n - a_{n+1}``, hence nuclear;
products and derivatives map level ``n`` into level ``n+1`` with explicit
constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .mollify import AbsX, Dirac, FiniteSum, Heaviside, Sign, Smooth

__all__ = [
    "ScaleParams", "SpectralElement", "ScaleNormReport", "norm",
    "inclusion_singular_values", "nuclear_norm_inclusion", "nuclear_closed_form",
    "product", "product_tail", "product_bound", "check_product",
    "derivative", "derivative_bound", "check_derivative",
    "compact_rank", "truncation_rank", "project", "projection_error",
    "mollified_embed", "weak_strong_demo", "weak_product_counterexample",
    "random_element",
]

NUCLEAR_TAIL = 1e-13
MARGIN_SLACK = 1e-12
FFT_CUTOFF = 1e-14


@dataclass(frozen=True)
class ScaleParams:
    a0: float = 1.0
    levels: int = 4
    truncation: int = 256

    def __post_init__(self):
        if not self.a0 > 0:
            raise ValueError("a0 must be positive")
        if self.levels < 3:
            raise ValueError("need at least 3 levels")
        if self.truncation < 1:
            raise ValueError("truncation must be >= 1")

    def weight(self, n):
        self._check_level(n)
        return self.a0 * 2.0**-n

    def gap(self, n):
        """``d_n = a_n - a_{n+1}``; needs ``n + 1 < levels``."""
        self._check_level(n + 1)
        return self.a0 * 2.0 ** -(n + 1)

    def _check_level(self, n):
        if not 0 <= n < self.levels:
            raise IndexError(f"level {n} out of range 0..{self.levels - 1}")


DEFAULT = ScaleParams()


@dataclass(frozen=True)
class SpectralElement:
    """``u(x) = sum_{|k|<=K} c_k exp(ikx)``; ``coeffs[k + K] = c_k``."""

    coeffs: np.ndarray
    real: bool = True

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coefficient vector must have odd length 2K+1")
        if self.real and not np.allclose(c[::-1], np.conj(c), rtol=0, atol=1e-12 * max(1.0, np.abs(c).max())):
            raise ValueError("real element must satisfy c_{-k} = conj(c_k)")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self):
        return self.coeffs.size // 2

    @property
    def ks(self):
        return np.arange(-self.K, self.K + 1)

    def mode(self, k):
        return self.coeffs[k + self.K] if abs(k) <= self.K else 0j

    @classmethod
    def zeros(cls, K=DEFAULT.truncation):
        return cls(np.zeros(2 * K + 1, complex))

    @classmethod
    def basis(cls, k, K=DEFAULT.truncation):
        """``exp(ikx)``; complex unless ``k == 0``."""
        c = np.zeros(2 * K + 1, complex)
        c[k + K] = 1.0
        return cls(c, real=(k == 0))

    @classmethod
    def constant(cls, value=1.0, K=DEFAULT.truncation):
        c = np.zeros(2 * K + 1, complex)
        c[K] = value
        return cls(c, real=np.isreal(value))

    def __add__(self, other):
        K = max(self.K, other.K)
        return SpectralElement(_pad(self.coeffs, K) + _pad(other.coeffs, K), self.real and other.real)

    def __sub__(self, other):
        K = max(self.K, other.K)
        return SpectralElement(_pad(self.coeffs, K) - _pad(other.coeffs, K), self.real and other.real)

    def scaled(self, s):
        return SpectralElement(self.coeffs * s, self.real and np.isreal(s))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        vals = np.exp(1j * np.multiply.outer(x, self.ks)) @ self.coeffs
        return vals.real if self.real else vals


def _pad(c, K):
    k0 = c.size // 2
    if k0 == K:
        return c
    out = np.zeros(2 * K + 1, complex)
    out[K - k0:K + k0 + 1] = c
    return out


def _weighted_sq(c, a):
    k = np.abs(np.arange(-(c.size // 2), c.size // 2 + 1))
    return np.sum((np.exp(a * k) * np.abs(c)) ** 2)


def norm(u: SpectralElement, n: int, params: ScaleParams = DEFAULT) -> float:
    return float(math.sqrt(_weighted_sq(u.coeffs, params.weight(n))))


@dataclass(frozen=True)
class ScaleNormReport:
    level: int
    value: float
    bound: float

    @property
    def margin(self):
        return self.bound - self.value

    @property
    def ok(self):
        return self.margin >= -MARGIN_SLACK


# --- nuclear inclusion ------------------------------------------------------

def inclusion_singular_values(n, count, params: ScaleParams = DEFAULT):
    """Singular values of ``H_n -> H_{n+1}`` for ``|k| = 0..count-1``, listed with multiplicity."""
    d = params.gap(n)
    k = np.arange(count)
    vals = np.exp(-d * k)
    return np.concatenate([vals[:1], np.repeat(vals[1:], 2)])


def nuclear_closed_form(n, params: ScaleParams = DEFAULT):
    return 1.0 / math.tanh(params.gap(n) / 2.0)


def nuclear_norm_inclusion(n, params: ScaleParams = DEFAULT) -> float:
    """Sum of the inclusion's singular values by truncated summation.

    The tail past ``|k| = M`` is ``2 exp(-d(M+1)) / (1 - exp(-d))``; ``M`` is
    chosen so this is below ``1e-13``.
    """
    d = params.gap(n)
    M = 0
    while 2.0 * math.exp(-d * (M + 1)) / (-math.expm1(-d)) >= NUCLEAR_TAIL:
        M += 1
    terms = np.exp(-d * np.arange(M, 0, -1))
    return float(1.0 + 2.0 * terms.sum())


# --- product and derivative ---------------------------------------------------

def _full_product(u, v):
    K = max(u.K, v.K)
    return np.convolve(_pad(u.coeffs, K), _pad(v.coeffs, K)), K


def product(u: SpectralElement, v: SpectralElement) -> SpectralElement:
    """Pointwise product, truncated to the larger of the two truncations."""
    full, K = _full_product(u, v)
    return SpectralElement(full[K:3 * K + 1], u.real and v.real)


def product_tail(u, v, level, params: ScaleParams = DEFAULT):
    """Level-``level`` norm of the modes dropped by :func:`product`."""
    full, K = _full_product(u, v)
    dropped = full.copy()
    dropped[K:3 * K + 1] = 0
    return float(math.sqrt(_weighted_sq(dropped, params.weight(level))))


def product_bound(n, params: ScaleParams = DEFAULT):
    """``||uv||_{n+1} <= sqrt(coth d_n) ||u||_n ||v||_n`` (weighted Young inequality)."""
    return math.sqrt(1.0 / math.tanh(params.gap(n)))


def check_product(u, v, n, params: ScaleParams = DEFAULT) -> ScaleNormReport:
    value = norm(product(u, v), n + 1, params)
    bound = product_bound(n, params) * norm(u, n, params) * norm(v, n, params)
    return ScaleNormReport(n + 1, value, bound)


def derivative(u: SpectralElement) -> SpectralElement:
    return SpectralElement(1j * u.ks * u.coeffs, u.real)


def derivative_bound(n, params: ScaleParams = DEFAULT):
    """``(max_k k exp(-d_n k), argmax k)`` over nonnegative integers."""
    d = params.gap(n)
    cands = {max(0, math.floor(1.0 / d)), math.ceil(1.0 / d)}
    best = max(cands, key=lambda k: k * math.exp(-d * k))
    return best * math.exp(-d * best), best


def check_derivative(u, n, params: ScaleParams = DEFAULT) -> ScaleNormReport:
    value = norm(derivative(u), n + 1, params)
    bound = derivative_bound(n, params)[0] * norm(u, n, params)
    return ScaleNormReport(n + 1, value, bound)


# --- compactness --------------------------------------------------------------

def compact_rank(n, delta, params: ScaleParams = DEFAULT) -> int:
    """Smallest ``m`` with ``exp(-d_n m) <= delta``.

    Keeping the modes ``|k| < m`` (rank ``max(0, 2m-1)``) approximates the
    inclusion ``H_n -> H_{n+1}`` within ``delta`` in operator norm: the
    largest discarded singular value is ``exp(-d_n m)``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    d = params.gap(n)
    m = max(0, math.ceil(-math.log(delta) / d) - 1)
    while m > 0 and math.exp(-d * (m - 1)) <= delta:
        m -= 1
    while not math.exp(-d * m) <= delta:
        m += 1
    return m


def truncation_rank(m):
    """Rank of the truncation keeping ``|k| < m``."""
    return max(0, 2 * m - 1)


def project(u: SpectralElement, m: int) -> SpectralElement:
    """Keep the modes ``|k| < m``."""
    c = np.where(np.abs(u.ks) < m, u.coeffs, 0)
    return SpectralElement(c, u.real)


def projection_error(u, m, level, params: ScaleParams = DEFAULT):
    return norm(u - project(u, m), level, params)


# --- distributions on the torus -------------------------------------------------

def _fourier(d, ks, params):
    k = ks.astype(float)
    nz = ks != 0
    safe = np.where(nz, k, 1.0)
    if isinstance(d, Dirac):
        return (1j * k) ** d.order * np.exp(-1j * k * d.center) / (2 * math.pi)
    if isinstance(d, Heaviside):
        # indicator of [x0, x0 + pi) repeated with period 2 pi
        odd = (ks % 2) != 0
        c = np.where(nz & odd, 1.0 / (1j * math.pi * safe), 0.0).astype(complex)
        c[~nz] = 0.5
        return c * np.exp(-1j * k * d.center)
    if isinstance(d, Sign):
        return 2.0 * _fourier(Heaviside(0.0), ks, params) - np.where(nz, 0.0, 1.0)
    if isinstance(d, AbsX):
        # |x| on [-pi, pi)
        c = np.where(nz, ((-1.0) ** np.abs(ks) - 1.0) / (math.pi * safe**2), math.pi / 2)
        return c.astype(complex)
    if isinstance(d, Smooth):
        K = params.truncation
        N = 8 * (K + 1)
        x = 2 * math.pi * np.arange(N) / N
        f = np.fft.fft(d.expr.evaluate(1.0, x)) / N
        c = f[np.mod(ks, N)]
        # FFT round-off would be amplified by the exponential weights
        return np.where(np.abs(c) > FFT_CUTOFF * max(np.abs(c).max(), 1e-300), c, 0)
    if isinstance(d, FiniteSum):
        out = np.zeros(ks.size, complex)
        for coef, term in d.terms:
            out += coef * _fourier(term, ks, params)
        return out
    raise TypeError(f"no periodization for {type(d).__name__}")


def mollified_embed(d, eps, params: ScaleParams = DEFAULT) -> SpectralElement:
    """Gaussian-damped Fourier coefficients ``d_hat(k) exp(-(eps k)^2 / 2)``."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")
    K = params.truncation
    ks = np.arange(-K, K + 1)
    c = _fourier(d, ks, params) * np.exp(-0.5 * (eps * ks) ** 2)
    return SpectralElement(c, real=True)


def _sin_mode(m):
    from .epsnet import Sin, X
    return Smooth(Sin(X * float(m)), f"sin({m}x)")


def weak_strong_demo(m_max=20, n=1, eps=1.0, params: ScaleParams = DEFAULT):
    """``[(m, ||mollified sin(mx)||_n) for m = 1..m_max]``."""
    return [(m, norm(mollified_embed(_sin_mode(m), eps, params), n, params))
            for m in range(1, m_max + 1)]


def _torus_values(psi, x):
    return np.asarray(psi(x), dtype=float)


def weak_product_counterexample(m_list: Sequence[int], psi: Callable, grid=4096):
    """Rows ``(m, <sin(mx), psi>, <sin^2(mx), psi>, (1/2) int psi)`` on ``[0, 2 pi)``.

    Integrals use the periodic trapezoid rule, exact for trigonometric
    polynomials of degree below ``grid``.
    """
    x = 2 * math.pi * np.arange(grid) / grid
    w = 2 * math.pi / grid
    pv = _torus_values(psi, x)
    half = 0.5 * w * pv.sum()
    rows = []
    for m in m_list:
        s = np.sin(m * x)
        rows.append((int(m), float(w * np.dot(s, pv)), float(w * np.dot(s * s, pv)), float(half)))
    return rows


def random_element(rng, n, params: ScaleParams = DEFAULT, K=None):
    """Real element with level-``n`` weighted coefficients of order one."""
    K = params.truncation if K is None else K
    ks = np.arange(0, K + 1)
    z = rng.normal(size=K + 1) + 1j * rng.normal(size=K + 1)
    z *= np.exp(-params.weight(n) * ks) / (1.0 + ks) ** rng.uniform(0.5, 2.0)
    z[0] = z[0].real
    return SpectralElement(np.concatenate([np.conj(z[:0:-1]), z]), real=True)
