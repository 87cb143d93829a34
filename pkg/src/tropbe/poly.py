"""Dense complex polynomials in ascending-power order."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ParseError
from .xprec import XComplex, XReal


class Precision(enum.Enum):
    WORKING = "working"
    EXTENDED = "extended"


@dataclass(frozen=True, eq=False)
class Polynomial:
    """c_0 + c_1 x + ... + c_d x^d with c_d != 0 (or the constant 0)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise DomainError("polynomial needs at least one coefficient")
        if c[-1] == 0 and c.size > 1:
            raise DomainError("leading coefficient must be nonzero")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, x):
        return eval_poly(self, x)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(self.coeffs.size, other.coeffs.size)
        c = np.zeros(n, dtype=complex)
        c[: self.coeffs.size] += self.coeffs
        c[: other.coeffs.size] += other.coeffs
        return Polynomial(np.trim_zeros(c, "b") if np.any(c) else np.zeros(1))

    def __eq__(self, other):
        return isinstance(other, Polynomial) and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()!r})"


def eval_poly(p: Polynomial, x):
    """Horner's scheme in working precision; accepts scalars or arrays."""
    acc = np.zeros_like(np.asarray(x, dtype=complex)) + p.coeffs[-1]
    for c in p.coeffs[-2::-1]:
        acc = acc * x + c
    return acc if np.ndim(acc) else complex(acc)


def derivative(p: Polynomial, k: int = 1) -> Polynomial:
    """k-th derivative; ``k > d`` gives the constant zero polynomial."""
    if k < 1:
        raise ValueError("k must be positive")
    d = p.degree
    if k > d:
        return Polynomial(np.zeros(1))
    i = np.arange(k, d + 1)
    # i! / (i-k)! as exact integers before conversion
    fall = np.array([math.perm(int(j), k) for j in i], dtype=float)
    return Polynomial(p.coeffs[k:] * fall)


def from_roots_extended(c_d: complex, roots) -> XComplex:
    """Coefficients of c_d * prod(x - r_j) in double-double, ascending order.

    ``roots`` may be working-precision complex values or an :class:`XComplex`
    vector.  The product is expanded one linear factor at a time; the leading
    entry is exactly ``c_d``.
    """
    if c_d == 0:
        raise DomainError("leading coefficient must be nonzero")
    r = roots if isinstance(roots, XComplex) else XComplex.of(np.asarray(roots, dtype=complex).ravel())
    acc = _expand_scalar(r) if r.size <= _SCALAR_MAX else _expand_vector(r)
    if c_d != 1:
        acc = acc * XComplex.of(complex(c_d))
    # leading entry is exactly c_d (1 * c_d is exact)
    return acc


# below this degree numpy call overhead outweighs vectorization
_SCALAR_MAX = 16


def _scalar_root(r: XComplex, j: int) -> XComplex:
    return XComplex(XReal(float(r.re.hi[j]), float(r.re.lo[j])),
                    XReal(float(r.im.hi[j]), float(r.im.lo[j])))


def _expand_scalar(r: XComplex) -> XComplex:
    one, zero = XComplex(XReal(1.0, 0.0), XReal(0.0, 0.0)), XComplex(XReal(0.0, 0.0), XReal(0.0, 0.0))
    acc = [one]
    for j in range(r.size):
        neg = -_scalar_root(r, j)
        new = [acc[0] * neg]
        new += [acc[k - 1] + acc[k] * neg for k in range(1, len(acc))]
        new.append(acc[-1])
        acc = new
    acc = acc or [zero]
    return XComplex(XReal(np.array([z.re.hi for z in acc]), np.array([z.re.lo for z in acc])),
                    XReal(np.array([z.im.hi for z in acc]), np.array([z.im.lo for z in acc])))


def _expand_vector(r: XComplex) -> XComplex:
    d = r.size
    acc = XComplex.of(np.zeros(d + 1, dtype=complex))
    acc.re.hi[0] = 1.0
    for j in range(d):
        # acc <- acc * (x - r_j): new[0] = -r_j a[0], new[k] = a[k-1] - r_j a[k],
        # new[j+1] = a[j]; entries past j+1 are still zero
        head = acc.take(slice(0, j + 1))
        prod = head * (-_scalar_root(r, j))
        mid = head.take(slice(0, j)) + prod.take(slice(1, j + 1))
        _put(acc, slice(j + 1, j + 2), head.take(slice(j, j + 1)))
        _put(acc, slice(1, j + 1), mid)
        _put(acc, slice(0, 1), prod.take(slice(0, 1)))
    return acc


def _put(target: XComplex, sl, value: XComplex):
    target.re.hi[sl], target.re.lo[sl] = value.re.hi, value.re.lo
    target.im.hi[sl], target.im.lo[sl] = value.im.hi, value.im.lo


def from_roots(c_d: complex, roots, precision: Precision = Precision.EXTENDED) -> Polynomial:
    """Expand c_d * prod(x - r_j), returning working-precision coefficients."""
    if precision is Precision.EXTENDED:
        return Polynomial(from_roots_extended(c_d, roots).to_complex())
    if c_d == 0:
        raise DomainError("leading coefficient must be nonzero")
    roots = np.asarray(roots.to_complex() if isinstance(roots, XComplex) else roots,
                       dtype=complex).ravel()
    c = np.ones(1, dtype=complex)
    for r in roots:
        c = _mul_linear(np.append(c, 0), r)
    return Polynomial(c * c_d if c_d != 1 else c)


def _mul_linear(c: np.ndarray, r: complex) -> np.ndarray:
    # c has a trailing zero slot; returns c(x) * (x - r)
    out = np.zeros_like(c)
    out[1:] = c[:-1]
    out[:-1] -= r * c[:-1]
    return out


# ---------------------------------------------------------------------------
# ScaledReal and elementary symmetric functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledReal:
    """mantissa * 2**exponent with mantissa in [1, 2) or exactly zero."""

    mantissa: float
    exponent: int

    @classmethod
    def of(cls, x: float) -> "ScaledReal":
        if x < 0 or math.isnan(x) or math.isinf(x):
            raise ValueError("ScaledReal holds finite non-negative values only")
        if x == 0:
            return ZERO
        m, e = math.frexp(x)
        return cls(2.0 * m, e - 1)

    @staticmethod
    def _norm(m: float, e: int) -> "ScaledReal":
        if m == 0:
            return ZERO
        mm, ee = math.frexp(m)
        return ScaledReal(2.0 * mm, e + ee - 1)

    def __add__(self, other: "ScaledReal") -> "ScaledReal":
        if self.mantissa == 0:
            return other
        if other.mantissa == 0:
            return self
        a, b = (self, other) if self.exponent >= other.exponent else (other, self)
        shift = b.exponent - a.exponent
        if shift < -1100:
            return a
        return ScaledReal._norm(a.mantissa + math.ldexp(b.mantissa, shift), a.exponent)

    def __mul__(self, other: "ScaledReal") -> "ScaledReal":
        if self.mantissa == 0 or other.mantissa == 0:
            return ZERO
        return ScaledReal._norm(self.mantissa * other.mantissa, self.exponent + other.exponent)

    def log(self) -> float:
        """Natural logarithm; -inf for zero."""
        if self.mantissa == 0:
            return -math.inf
        return math.log(self.mantissa) + self.exponent * math.log(2.0)

    def __float__(self) -> float:
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            return math.inf


ZERO = ScaledReal(0.0, 0)


def elem_sym_abs(values) -> list[ScaledReal]:
    """sigma_0..sigma_d of non-negative reals by the one-value-at-a-time recurrence."""
    vals = [float(v) for v in values]
    if any(v < 0 for v in vals):
        raise DomainError("elem_sym_abs expects non-negative values")
    sig = [ScaledReal(1.0, 0)]
    for v in vals:
        sv = ScaledReal.of(v)
        new = sig + [ZERO]
        for k in range(len(sig), 0, -1):
            new[k] = sig[k] + sv * sig[k - 1] if k < len(sig) else sv * sig[k - 1]
        sig = new
    return sig


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------

FORMAT_HELP = """\
Polynomial and root files: one complex number per line as two
whitespace-separated decimal fields `re im`.  Polynomial files list
coefficients c_0, c_1, ..., c_d in ascending power.  Lines whose first
non-blank character is `#` and blank lines are ignored."""


def read_complex_list(path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc.strerror})") from exc
    vals = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        fields = s.split()
        if len(fields) != 2:
            raise ParseError(f"{path}:{lineno}: expected two fields 're im', got {len(fields)}")
        try:
            vals.append(complex(float(fields[0]), float(fields[1])))
        except ValueError:
            raise ParseError(f"{path}:{lineno}: not a decimal number pair: {s!r}") from None
    return np.array(vals, dtype=complex)


def read_polynomial(path) -> Polynomial:
    c = read_complex_list(path)
    if c.size == 0:
        raise ParseError(f"{path}: no coefficients found")
    if c[-1] == 0:
        raise ParseError(f"{path}: leading coefficient (last line) is zero")
    return Polynomial(c)


def format_complex_list(values) -> str:
    return "".join(f"{z.real:.17g} {z.imag:.17g}\n" for z in np.asarray(values, dtype=complex))


def write_complex_list(path, values, header: str | None = None):
    text = format_complex_list(values)
    if header:
        text = "".join(f"# {h}\n" for h in header.splitlines()) + text
    Path(path).write_text(text)
