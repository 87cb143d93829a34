"""Double-double real and complex arithmetic, plus extended-precision Newton.

Every kernel works elementwise on Python floats or numpy arrays, so a whole
vector of roots can be refined in one sweep.  Products use Dekker splitting
(``math.fma`` is unavailable before Python 3.13), which is exact as long as
operands stay below roughly 2**996 in magnitude.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

#: unit roundoff of IEEE binary64
U = 2.0 ** -53

_SPLITTER = 134217729.0  # 2**27 + 1


# ---------------------------------------------------------------------------
# error-free transformations
# ---------------------------------------------------------------------------

def two_sum(a, b):
    """Return (s, e) with s = fl(a + b) and s + e = a + b exactly."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a, b):
    """two_sum assuming |a| >= |b|."""
    s = a + b
    e = b - (s - a)
    return s, e


def split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Return (p, e) with p = fl(a * b) and p + e = a * b exactly."""
    p = a * b
    ahi, alo = split(a)
    bhi, blo = split(b)
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


# ---------------------------------------------------------------------------
# XReal
# ---------------------------------------------------------------------------

class XReal(NamedTuple):
    """Unevaluated sum hi + lo with |lo| <= ulp(hi)/2."""

    hi: object
    lo: object

    @classmethod
    def of(cls, a) -> "XReal":
        a = np.asarray(a, dtype=float) if isinstance(a, (list, tuple, np.ndarray)) else float(a)
        return cls(a, a * 0.0)

    def __neg__(self):
        return XReal(-self.hi, -self.lo)

    def __add__(self, other):
        other = _xr(other)
        s, e = two_sum(self.hi, other.hi)
        t, f = two_sum(self.lo, other.lo)
        e = e + t
        s, e = quick_two_sum(s, e)
        e = e + f
        return XReal(*quick_two_sum(s, e))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_xr(other))

    def __rsub__(self, other):
        return _xr(other) - self

    def __mul__(self, other):
        other = _xr(other)
        p, e = two_prod(self.hi, other.hi)
        e = e + (self.hi * other.lo + self.lo * other.hi)
        return XReal(*quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _xr(other)
        q1 = self.hi / other.hi
        r = self - other * q1
        q2 = r.hi / other.hi
        r = r - other * q2
        q3 = r.hi / other.hi
        s, e = quick_two_sum(q1, q2)
        return XReal(s, e) + q3

    def __float__(self):
        return float(self.hi + self.lo)

    def value(self):
        return self.hi + self.lo

    def sqrt(self) -> "XReal":
        # one Newton step on the working-precision root doubles the accuracy
        x = np.sqrt(self.hi)
        with np.errstate(invalid="ignore", divide="ignore"):
            p, e = two_prod(x, x)
            d = ((self.hi - p) - e + self.lo) / (2.0 * x)
        d = np.where(x == 0, 0.0, d) if isinstance(x, np.ndarray) else (0.0 if x == 0 else d)
        return XReal(*quick_two_sum(x, d))

    def abs(self) -> "XReal":
        sign = np.where(self.hi < 0, -1.0, 1.0)
        if not isinstance(self.hi, np.ndarray):
            sign = float(sign)
        return XReal(self.hi * sign, self.lo * sign)


def _xr(a) -> XReal:
    if isinstance(a, XReal):
        return a
    if isinstance(a, np.ndarray):
        return XReal(a.astype(float), np.zeros(a.shape))
    return XReal(float(a), 0.0)


# ---------------------------------------------------------------------------
# XComplex
# ---------------------------------------------------------------------------

class XComplex(NamedTuple):
    re: XReal
    im: XReal

    @classmethod
    def of(cls, z) -> "XComplex":
        """Exact promotion of a working-precision complex scalar or array."""
        if isinstance(z, XComplex):
            return z
        if isinstance(z, np.ndarray) or isinstance(z, (list, tuple)):
            z = np.asarray(z, dtype=complex)
            zero = np.zeros(z.shape)
            return cls(XReal(z.real.copy(), zero), XReal(z.imag.copy(), zero.copy()))
        z = complex(z)
        return cls(XReal(z.real, 0.0), XReal(z.imag, 0.0))

    @classmethod
    def zeros(cls, n: int) -> "XComplex":
        return cls.of(np.zeros(n, dtype=complex))

    def __neg__(self):
        return XComplex(-self.re, -self.im)

    def __add__(self, other):
        other = XComplex.of(other)
        return XComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = XComplex.of(other)
        return XComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return XComplex.of(other) - self

    def __mul__(self, other):
        other = XComplex.of(other)
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        return XComplex(re, im)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return x_div(self, XComplex.of(other))

    def abs2(self) -> XReal:
        return self.re * self.re + self.im * self.im

    def abs(self) -> XReal:
        return x_abs(self)

    def to_complex(self):
        """Round to working precision."""
        return self.re.value() + 1j * self.im.value()

    def take(self, idx) -> "XComplex":
        return XComplex(XReal(self.re.hi[idx], self.re.lo[idx]),
                        XReal(self.im.hi[idx], self.im.lo[idx]))

    @property
    def size(self) -> int:
        return int(np.size(self.re.hi))


def x_add(a: XComplex, b: XComplex) -> XComplex:
    return XComplex.of(a) + b


def x_mul(a: XComplex, b: XComplex) -> XComplex:
    return XComplex.of(a) * b


def x_div(a: XComplex, b: XComplex) -> XComplex:
    """Complex division; raises ZeroDivisionError on an exactly zero divisor."""
    a, b = XComplex.of(a), XComplex.of(b)
    zero = (np.asarray(b.re.hi) == 0) & (np.asarray(b.im.hi) == 0)
    if np.any(zero):
        raise ZeroDivisionError("extended-precision division by zero")
    # scale by a power of two so |b|**2 neither overflows nor underflows
    scale = np.exp2(-np.floor(np.log2(np.maximum(np.abs(b.re.hi), np.abs(b.im.hi)))))
    if not isinstance(b.re.hi, np.ndarray):
        scale = float(scale)
    bs = XComplex(b.re * scale, b.im * scale)
    den = bs.abs2()
    num = a * XComplex(bs.re, -bs.im)
    return XComplex(num.re / den * scale, num.im / den * scale)


def x_abs(a: XComplex) -> XReal:
    a = XComplex.of(a)
    m = np.maximum(np.abs(a.re.hi), np.abs(a.im.hi))
    if isinstance(m, np.ndarray):
        scale = np.where(m > 0, np.exp2(-np.floor(np.log2(np.where(m > 0, m, 1.0)))), 1.0)
    else:
        scale = float(np.exp2(-np.floor(np.log2(m)))) if m > 0 else 1.0
    s = XComplex(a.re * scale, a.im * scale)
    r = s.abs2().sqrt()
    return XReal(r.hi / scale, r.lo / scale)


# ---------------------------------------------------------------------------
# Newton refinement
# ---------------------------------------------------------------------------

class NewtonStatus(enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    DIVERGED = "diverged"


class Evaluation(enum.Enum):
    #: f and f' evaluated exactly (integer Horner) at the double-double iterate
    EXACT = "exact"
    #: f and f' evaluated by Horner in double-double arithmetic
    DOUBLE_DOUBLE = "double-double"


@dataclass(frozen=True)
class NewtonConfig:
    max_iter: int = 64
    rel_tol: float = U * U
    divergence_factor: float = 1e3
    evaluation: Evaluation = Evaluation.EXACT

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0 < self.rel_tol < U:
            raise ValueError("rel_tol must lie in (0, u)")


def _dyadic_ints(values):
    """Floats as ints over one power of two: values[k] = ints[k] / 2**e."""
    pairs = [float(v).as_integer_ratio() for v in values]
    e = max(den.bit_length() - 1 for _, den in pairs)
    return [num << (e - (den.bit_length() - 1)) for num, den in pairs], e


class _ExactStepper:
    """Newton corrections f(x)/f'(x) computed exactly, then rounded to double-double."""

    def __init__(self, coeffs):
        c = coeffs if isinstance(coeffs, XComplex) else XComplex.of(np.asarray(coeffs, dtype=complex))
        n = c.size
        ints, self.F = _dyadic_ints(np.concatenate([c.re.hi, c.re.lo, c.im.hi, c.im.lo]))
        self.cr = [ints[k] + ints[n + k] for k in range(n)]
        self.ci = [ints[2 * n + k] + ints[3 * n + k] for k in range(n)]
        self.d = n - 1

    def __call__(self, x: XComplex):
        (rh, rl, ih, il), E = _dyadic_ints((x.re.hi, x.re.lo, x.im.hi, x.im.lo))
        Xr, Xi = rh + rl, ih + il
        d = self.d
        # P_k = f_k 2**(F + E(d-k)),  Q_k = g_k 2**(F + E(d-k-1)),
        # with f_k, g_k the Horner partials of f and f'
        pr, pi = self.cr[d], self.ci[d]
        qr = qi = 0
        for k in range(d - 1, -1, -1):
            qr, qi = qr * Xr - qi * Xi + pr, qr * Xi + qi * Xr + pi
            sh = E * (d - k)
            pr, pi = (pr * Xr - pi * Xi + (self.cr[k] << sh),
                      pr * Xi + pi * Xr + (self.ci[k] << sh))
        den = qr * qr + qi * qi
        if den == 0:
            return None
        den <<= E
        return XComplex(_ratio_to_x(pr * qr + pi * qi, den), _ratio_to_x(pi * qr - pr * qi, den))


def _ratio_to_x(num: int, den: int) -> XReal:
    """num / den (den > 0) rounded to double-double without gcd reductions."""
    try:
        hi = num / den  # int true division is correctly rounded
    except OverflowError:
        return XReal(math.copysign(math.inf, num), 0.0)
    if hi == 0.0 or not math.isfinite(hi):
        return XReal(hi, 0.0)
    hn, hd = hi.as_integer_ratio()
    # num/den - hn/hd = (num hd - hn den) / (den hd), exact in integers
    return XReal(hi, (num * hd - hn * den) / (den * hd))


class _DoubleDoubleStepper:
    def __init__(self, coeffs):
        if isinstance(coeffs, XComplex):
            self.coeffs = [_scalar(coeffs.take(i)) for i in range(coeffs.size)]
        else:
            self.coeffs = [XComplex.of(c) for c in coeffs]
        self.d = len(self.coeffs) - 1

    @staticmethod
    def _horner(cs, pt):
        f, fp = cs[-1], XComplex.of(0.0)
        for c in cs[-2::-1]:
            fp = fp * pt + f
            f = f * pt + c
        return f, fp

    def __call__(self, x: XComplex):
        if abs(x.re.hi) + abs(x.im.hi) <= 1.0:
            f, fp = self._horner(self.coeffs, x)
            num, den = f, fp
        else:
            # f/f' = x g(y) / (d g(y) - y g'(y)),  g the reversal, y = 1/x
            y = x_div(XComplex.of(1.0), x)
            g, gp = self._horner(self.coeffs[::-1], y)
            num, den = x * g, g * float(self.d) - y * gp
        if den.re.hi == 0 and den.im.hi == 0:
            return None
        return x_div(num, den)


def _scalar(z: XComplex) -> XComplex:
    return XComplex(XReal(float(z.re.hi), float(z.re.lo)), XReal(float(z.im.hi), float(z.im.lo)))


def _abs_scalar(z: XComplex) -> float:
    # stopping tests only need the modulus to working precision
    return math.hypot(float(z.re.hi) + float(z.re.lo), float(z.im.hi) + float(z.im.lo))


@dataclass
class NewtonResult:
    root: XComplex
    status: list
    iterations: np.ndarray

    @property
    def converged(self) -> bool:
        return all(s is NewtonStatus.CONVERGED for s in self.status)


def _refine_one(step, x0: complex, cfg: NewtonConfig):
    x = XComplex.of(complex(x0))
    limit = cfg.divergence_factor * (1.0 + abs(x0))
    prev = np.inf
    for it in range(1, cfg.max_iter + 1):
        delta = step(x)
        if delta is None:
            return x, NewtonStatus.DIVERGED, it
        x = _scalar(x - delta)
        size = _abs_scalar(delta)
        mag = _abs_scalar(x)
        if not np.isfinite(size) or mag > limit:
            return x, NewtonStatus.DIVERGED, it
        # stagnation at the noise floor of the representation counts as converged
        if size <= cfg.rel_tol * mag or (prev <= U * mag and size > 0.5 * prev):
            return x, NewtonStatus.CONVERGED, it
        prev = size
    return x, NewtonStatus.MAX_ITER, cfg.max_iter


def newton_refine_many(coeffs, x0, cfg: NewtonConfig = NewtonConfig()) -> NewtonResult:
    """Refine several starting points independently against one polynomial.

    ``coeffs`` are working-precision coefficients (ascending powers), promoted
    exactly, or an :class:`XComplex` coefficient vector.  A point stops when the correction satisfies
    ``|dx| <= rel_tol |x|``, or when it stalls at the noise floor of the
    double-double representation (previous step already below ``u |x|`` and
    the current one no smaller than half of it).
    """
    if not isinstance(coeffs, XComplex):
        coeffs = np.asarray(coeffs, dtype=complex)
    if (coeffs.size if isinstance(coeffs, XComplex) else len(coeffs)) < 2:
        raise ValueError("polynomial must have degree >= 1")
    x0 = np.atleast_1d(np.asarray(x0, dtype=complex))
    step = (_ExactStepper if cfg.evaluation is Evaluation.EXACT else _DoubleDoubleStepper)(coeffs)
    n = x0.size
    out = XComplex.zeros(n)
    status, iters = [], np.zeros(n, dtype=int)
    for j in range(n):
        x, st, it = _refine_one(step, x0[j], cfg)
        out.re.hi[j], out.re.lo[j] = x.re
        out.im.hi[j], out.im.lo[j] = x.im
        status.append(st)
        iters[j] = it
    return NewtonResult(out, status, iters)


def newton_refine(p, x0: complex, cfg: NewtonConfig = NewtonConfig()):
    """Refine one root of ``p`` in extended precision; returns (root, status)."""
    coeffs = getattr(p, "coeffs", p)
    res = newton_refine_many(coeffs, [x0], cfg)
    return res.root.take(0), res.status[0]
