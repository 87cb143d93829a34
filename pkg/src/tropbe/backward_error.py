"""Backward error measures for a set of approximate polynomial roots.

All reconstructions c_d * prod(x - x_j) are carried out in double-double so
that expansion rounding never masks the error being measured.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ConvergenceError, DomainError, SingularDerivativeError, WitnessError
from .poly import Polynomial, from_roots_extended
from .rootfind import AberthConfig, aberth
from .rootset import RootSet, as_rootset
from .tropical import TropicalData, tropical_roots
from .xprec import _dyadic_ints, _ratio_to_x, NewtonConfig, NewtonStatus, XComplex, XReal, newton_refine_many, x_abs

ALL_MEASURES = ("nbe", "ebe", "tbe", "embe")
COLLISION_TOL = 1e-20


def _coeff_array(c) -> np.ndarray:
    return np.asarray(c.coeffs if isinstance(c, Polynomial) else c, dtype=complex)


def _abs_diff(c, c_hat) -> np.ndarray:
    """|c_i - c_hat_i| for i = 0..d-1, with the subtraction done in double-double."""
    c = _coeff_array(c)
    c_hat = XComplex.of(c_hat)
    if c_hat.size != c.size:
        raise DomainError(f"coefficient vectors differ in length ({c.size} vs {c_hat.size})")
    diff = XComplex.of(c) - c_hat
    # the subtraction is the step that needs double-double; its modulus only
    # needs working precision
    return np.hypot(diff.re.value(), diff.im.value())[:-1]


def nbe(c, c_hat) -> float:
    """||c - c_hat||_2 / ||c||_2; the leading coefficient is shared and skipped."""
    c = _coeff_array(c)
    return _nbe_from_diff(c, _abs_diff(c, c_hat))


def _nbe_from_diff(c, diff) -> float:
    scale = np.max(np.abs(c))
    return float(np.linalg.norm(diff / scale) / np.linalg.norm(np.abs(c) / scale))


def ebe(c, c_hat) -> float:
    """max_i |c_i - c_hat_i| / |c_i| over i < d; +inf if some c_i = 0 was perturbed."""
    c = _coeff_array(c)
    return _ebe_from_diff(c, _abs_diff(c, c_hat))


def _ebe_from_diff(c, diff) -> float:
    a = np.abs(c[:-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(a > 0, diff / np.where(a > 0, a, 1.0), np.where(diff > 0, np.inf, 0.0))
    return float(rel.max()) if rel.size else 0.0


def _scaled_from_diff(c, diff, r) -> np.ndarray:
    a = np.abs(c[:-1])
    r = r[:-1]
    nz = a > 0
    # the order of operations keeps every entry <= the plain relative error
    return np.where(nz, diff / (r * np.where(nz, a, 1.0)), diff / r)


def reconstruct(p: Polynomial, x_hat) -> XComplex:
    """Coefficients of c_d * prod(x - x_hat_j) in double-double."""
    x_hat = as_rootset(x_hat)
    if len(x_hat) != p.degree:
        raise DomainError(f"expected {p.degree} roots, got {len(x_hat)}")
    return from_roots_extended(p.leading, x_hat.as_extended())


@dataclass(frozen=True)
class CoeffError:
    index: int
    abs_error: float
    rel_error: float
    scaled_error: float


def tbe(p: Polynomial, x_hat, t: TropicalData | None = None):
    """Tropical backward error and the per-coefficient breakdown."""
    t = tropical_roots(p) if t is None else t
    c = p.coeffs
    diff = _abs_diff(c, reconstruct(p, x_hat))
    scaled = _scaled_from_diff(c, diff, t.r)
    per = _per_coeff(c, diff, scaled)
    return (float(scaled.max()) if scaled.size else 0.0), per


def _per_coeff(c, diff, scaled):
    # np.abs, not abs(): the two hypot implementations can differ by an ulp
    mags = np.abs(c[:-1])
    out = []
    for i in range(diff.size):
        a = mags[i]
        rel = diff[i] / a if a > 0 else (math.inf if diff[i] > 0 else 0.0)
        out.append(CoeffError(i, float(diff[i]), float(rel), float(scaled[i])))
    return out


def _elementwise(c, c_tilde: XComplex) -> float:
    """Smallest eps with |c_i - ~c_i| <= eps |c_i| (or <= eps when c_i = 0)."""
    c = _coeff_array(c)
    diff = _abs_diff(c, c_tilde)
    a = np.abs(c[:-1])
    vals = np.where(a > 0, diff / np.where(a > 0, a, 1.0), diff)
    return float(vals.max()) if vals.size else 0.0


def _relative_distance(x_hat: XComplex, x_tilde: XComplex) -> np.ndarray:
    return x_abs(x_hat - x_tilde).value() / x_abs(x_tilde).value()


# ---------------------------------------------------------------------------
# EMBE upper bound
# ---------------------------------------------------------------------------

@dataclass
class EmbeBound:
    """Upper bound on the element-wise mixed backward error.

    ``value`` is None when some refinement diverged.  ``witness`` holds the
    refined roots used as the intermediate root set.
    """

    value: float | None
    forward: float
    coefficient: float
    witness: RootSet
    statuses: list
    collision: bool
    forward_errors: np.ndarray = field(repr=False)

    @property
    def available(self) -> bool:
        return self.value is not None


def _collision(x_hat: np.ndarray, x_tilde: XComplex) -> bool:
    xt = x_tilde.to_complex()
    d = xt.size
    for j in range(d):
        for k in range(j):
            close_t = abs(xt[j] - xt[k]) <= COLLISION_TOL * max(abs(xt[j]), abs(xt[k]))
            close_h = abs(x_hat[j] - x_hat[k]) <= COLLISION_TOL * max(abs(x_hat[j]), abs(x_hat[k]))
            if close_t and not close_h:
                return True
    return False


def embe_upper_bound(p: Polynomial, x_hat, cfg: NewtonConfig = NewtonConfig()) -> EmbeBound:
    """Refine each root against ``p`` and use the result as the EMBE witness.

    The bound is max(forward distance x_hat -> refined, element-wise error of
    the refined roots' polynomial).  Any witness yields an upper bound on the
    infimum, so the value is valid even when refinement stops early, except
    after divergence, where it is reported as unavailable.
    """
    x_hat = as_rootset(x_hat)
    tropical_roots(p)  # precondition check: c_0, c_d != 0
    res = newton_refine_many(p.coeffs, x_hat.roots, cfg)
    bad = np.array([s is NewtonStatus.DIVERGED for s in res.status])
    if bad.any():
        # a diverged iterate may be zero or huge; report the computed roots instead
        xh = x_hat.as_extended()
        return EmbeBound(None, math.nan, math.nan, x_hat, res.status, False,
                         np.where(bad, math.nan, _relative_distance(xh, _patch(res.root, xh, bad))))
    witness = RootSet.from_extended(res.root)
    fwd = _relative_distance(x_hat.as_extended(), res.root)
    forward = float(fwd.max())
    coef = _elementwise(p.coeffs, from_roots_extended(p.leading, res.root))
    collision = _collision(x_hat.roots, res.root)
    return EmbeBound(max(forward, coef), forward, coef, witness, res.status, collision, fwd)


def _patch(x: XComplex, fallback: XComplex, mask) -> XComplex:
    pick = lambda a, b: XReal(np.where(mask, b.hi, a.hi), np.where(mask, b.lo, a.lo))
    return XComplex(pick(x.re, fallback.re), pick(x.im, fallback.im))


# ---------------------------------------------------------------------------
# constructive witnesses
# ---------------------------------------------------------------------------

@dataclass
class QuadraticWitness:
    """Intermediate roots for a quadratic.

    The construction runs in exact rational arithmetic; ``exact`` holds the
    witness roots as (re, im) Fraction pairs and ``x_tilde`` their
    double-double rounding.  ``b_tilde``, ``c_tilde`` and ``epsilon`` describe
    the exact witness.
    """

    x_tilde: RootSet
    b_tilde: XComplex
    c_tilde: XComplex
    r_b: float
    epsilon: float
    exact: tuple = field(default=(), repr=False)


def quadratic_r_b(p: Polynomial) -> float:
    c, b, a = (complex(z) for z in p.coeffs)
    if b == 0:
        return max(1.0, math.sqrt(abs(a * c)))
    return max(1.0, math.sqrt(abs(a)) * math.sqrt(abs(c)) / abs(b))


# Gaussian integers as (re, im) pairs of Python ints; every double and
# double-double is an integer over a common power of two

def _gmul(a, b):
    return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]


def _gadd(a, b):
    return a[0] + b[0], a[1] + b[1]


def _gsub(a, b):
    return a[0] - b[0], a[1] - b[1]


def _gscale(a, k: int):
    return a[0] * k, a[1] * k


def _gabs2(a) -> int:
    return a[0] * a[0] + a[1] * a[1]


def _grel(num, ref) -> float:
    """|num| / |ref| for Gaussian integers over the same denominator."""
    n2 = _gabs2(num)
    return math.sqrt(n2 / _gabs2(ref)) if n2 else 0.0


def _g_to_x(zs, den: int) -> XComplex:
    re = [_ratio_to_x(z[0], den) for z in zs]
    im = [_ratio_to_x(z[1], den) for z in zs]
    return XComplex(XReal(np.array([r.hi for r in re]), np.array([r.lo for r in re])),
                    XReal(np.array([i.hi for i in im]), np.array([i.lo for i in im])))


def quadratic_witness(p: Polynomial, x_hat) -> QuadraticWitness:
    """Intermediate roots for a quadratic that keep b exactly.

    With b_hat = -a (x1 + x2), shifting the smaller root by (b_hat - b) / a
    gives a (x~1 + x~2) = -b; for r_b = 1 the computed roots are kept as is.
    The arithmetic is exact: all quantities are Gaussian integers over the
    common denominator |a|^2 2^e.
    """
    if p.degree != 2:
        raise DomainError("quadratic_witness needs a degree-2 polynomial")
    c, b, a = (complex(z) for z in p.coeffs)
    if a == 0 or c == 0:
        raise DomainError("a and c must be nonzero")
    x_hat = as_rootset(x_hat)
    xs = x_hat.as_extended()
    order = np.argsort(np.abs(x_hat.roots), kind="stable")
    j1, j2 = int(order[0]), int(order[1])
    parts = [a.real, a.imag, b.real, b.imag, c.real, c.imag]
    for j in (j1, j2):
        parts += [xs.re.hi[j], xs.re.lo[j], xs.im.hi[j], xs.im.lo[j]]
    ints, e = _dyadic_ints(parts)
    A, B, C = (ints[0], ints[1]), (ints[2], ints[3]), (ints[4], ints[5])
    X1 = (ints[6] + ints[7], ints[8] + ints[9])
    X2 = (ints[10] + ints[11], ints[12] + ints[13])
    one = 1 << e
    r_b = quadratic_r_b(p)
    # x~1 = T1 / D with D = |A|^2 2^e, and x2 = X2 |A|^2 / D
    a2 = _gabs2(A)
    D = a2 * one
    T1 = _gscale(X1, a2)
    if r_b > 1.0:
        # (b_hat - b) / a = N conj(A) / D with N = -A (X1 + X2) - B 2^e
        N = _gsub(_gmul((-A[0], -A[1]), _gadd(X1, X2)), _gscale(B, one))
        T1 = _gadd(T1, _gmul(N, (A[0], -A[1])))
    if T1 == (0, 0):
        raise WitnessError("witness root cancelled to zero")
    T2 = _gscale(X2, a2)
    # b~ = -A (T1 + T2) / (2^e D),  c~ = A T1 X2 / (2^e D 2^e)
    bt = _gmul((-A[0], -A[1]), _gadd(T1, T2))
    ct = _gmul(A, _gmul(T1, X2))
    fwd = _grel(_gsub(T1, _gscale(X1, a2)), T1)
    if B != (0, 0):
        b_err = _grel(_gsub(bt, _gscale(B, D)), _gscale(B, D))
    else:
        b_err = math.sqrt(_gabs2(bt) / (one * D) ** 2)
    c_err = _grel(_gsub(ct, _gscale(C, D * one)), _gscale(C, D * one))
    x_t = _g_to_x([T1, T2], D)
    order_back = [0, 1] if j1 == 0 else [1, 0]
    exact = tuple((Fraction(z[0], D), Fraction(z[1], D)) for z in ([T1, T2][k] for k in order_back))
    return QuadraticWitness(RootSet.from_extended(x_t.take(order_back)),
                            _g_to_x([bt], one * D).take(0), _g_to_x([ct], one * D * one).take(0),
                            r_b, max(fwd, b_err, c_err), exact)


@dataclass
class GeneralWitness:
    tilde_f: Polynomial
    tilde_coeffs: XComplex = field(repr=False)
    x_tilde: RootSet
    kept: np.ndarray
    forward: float
    coefficient: float

    @property
    def epsilon(self) -> float:
        return max(self.forward, self.coefficient)


def general_witness(p: Polynomial, x_hat, r_cap: float = 1e3,
                    aberth_cfg: AberthConfig = AberthConfig(),
                    newton_cfg: NewtonConfig = NewtonConfig()) -> GeneralWitness:
    """Witness polynomial that keeps the computed perturbation where r_i is moderate.

    Coefficients with r_i <= r_cap take their value from the computed roots'
    polynomial; the others revert to the original.  The roots of the result,
    matched to x_hat, form the intermediate root set.
    """
    if r_cap <= 1:
        raise ValueError("r_cap must exceed 1")
    x_hat = as_rootset(x_hat)
    t = tropical_roots(p)
    c_hat = reconstruct(p, x_hat)
    kept = t.r <= r_cap
    kept[-1] = True
    c = XComplex.of(p.coeffs)
    tilde = XComplex(
        XReal(np.where(kept, c_hat.re.hi, c.re.hi), np.where(kept, c_hat.re.lo, c.re.lo)),
        XReal(np.where(kept, c_hat.im.hi, c.im.hi), np.where(kept, c_hat.im.lo, c.im.lo)))
    tilde_f = Polynomial(tilde.to_complex())
    if kept.all():
        start = x_hat.roots
    else:
        try:
            start = aberth(tilde_f, cfg=aberth_cfg).roots
        except ConvergenceError as exc:
            raise ConvergenceError(f"rootfinding on the witness polynomial failed: {exc}",
                                   best=exc.best, residuals=exc.residuals) from exc
    res = newton_refine_many(tilde, start, newton_cfg)
    if any(s is NewtonStatus.DIVERGED for s in res.status):
        raise ConvergenceError("Newton polish on the witness polynomial diverged",
                               best=res.root.to_complex(), residuals=res.status)
    # match each computed root to one witness root
    xh = x_hat.as_extended()
    cost = np.abs(x_hat.roots[:, None] - res.root.to_complex()[None, :]) / np.abs(
        res.root.to_complex()[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = cols[np.argsort(rows)]
    x_tilde = res.root.take(perm)
    forward = float(_relative_distance(xh, x_tilde).max())
    coef = _elementwise(p.coeffs, from_roots_extended(p.leading, x_tilde))
    return GeneralWitness(tilde_f, tilde, RootSet.from_extended(x_tilde), kept, forward, coef)


# ---------------------------------------------------------------------------
# first-order perturbation
# ---------------------------------------------------------------------------

def _x_horner(coeffs: XComplex, x: XComplex):
    n = coeffs.size
    f = _scalar_at(coeffs, n - 1)
    fp = XComplex.of(0.0)
    for i in range(n - 2, -1, -1):
        fp = fp * x + f
        f = f * x + _scalar_at(coeffs, i)
    return f, fp


def _scalar_at(v: XComplex, i: int) -> XComplex:
    return XComplex(XReal(float(v.re.hi[i]), float(v.re.lo[i])),
                    XReal(float(v.im.hi[i]), float(v.im.lo[i])))


def perturbation_estimate(p: Polynomial, x_j: complex, delta_coeffs) -> complex:
    """First-order root shift -df(x_j) / (f'(x_j) + df'(x_j)) in double-double."""
    delta = np.zeros(p.degree + 1, dtype=complex)
    dc = np.asarray(delta_coeffs, dtype=complex).ravel()
    if dc.size > delta.size:
        raise DomainError("perturbation has higher degree than the polynomial")
    delta[: dc.size] = dc
    x = XComplex.of(complex(x_j))
    _, fp = _x_horner(XComplex.of(p.coeffs), x)
    df, dfp = _x_horner(XComplex.of(delta), x)
    den = fp + dfp
    if den.re.hi == 0 and den.im.hi == 0:
        raise SingularDerivativeError("f'(x_j) + df'(x_j) vanishes")
    return complex(-(df / den).to_complex())


# ---------------------------------------------------------------------------
# combined report
# ---------------------------------------------------------------------------

@dataclass
class ErrorReport:
    nbe: float | None = None
    ebe: float | None = None
    tbe: float | None = None
    embe_ub: float | None = None
    embe_status: str = "not computed"
    per_coeff: list = field(default_factory=list)
    refinement: list | None = None
    pairing_collision: bool = False


def analyze(p: Polynomial, x_hat, measures=ALL_MEASURES,
            newton_cfg: NewtonConfig = NewtonConfig()) -> ErrorReport:
    """Compute the requested measures for one root set."""
    unknown = set(measures) - set(ALL_MEASURES)
    if unknown:
        raise ValueError(f"unknown measures: {', '.join(sorted(unknown))}")
    x_hat = as_rootset(x_hat)
    c = p.coeffs
    diff = _abs_diff(c, reconstruct(p, x_hat))
    rep = ErrorReport()
    need_trop = "tbe" in measures or "embe" in measures
    t = tropical_roots(p) if need_trop else None
    scaled = _scaled_from_diff(c, diff, t.r) if t is not None else np.full(diff.shape, np.nan)
    rep.per_coeff = _per_coeff(c, diff, scaled)
    if "nbe" in measures:
        rep.nbe = _nbe_from_diff(c, diff)
    if "ebe" in measures:
        rep.ebe = _ebe_from_diff(c, diff)
    if "tbe" in measures:
        rep.tbe = float(scaled.max()) if scaled.size else 0.0
    if "embe" in measures:
        b = embe_upper_bound(p, x_hat, newton_cfg)
        rep.embe_ub = b.value
        rep.embe_status = "ok" if b.available else "unavailable"
        rep.pairing_collision = b.collision
        w = b.witness.roots
        rep.refinement = [(complex(x_hat.roots[j]), complex(w[j]), float(b.forward_errors[j]),
                           b.statuses[j].value) for j in range(len(x_hat))]
    return rep
