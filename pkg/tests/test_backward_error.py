import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from tropbe.backward_error import (analyze, ebe, embe_upper_bound, general_witness, nbe,
                                   perturbation_estimate, quadratic_r_b, quadratic_witness,
                                   reconstruct, tbe)
from tropbe.errors import DomainError, SingularDerivativeError
from tropbe.harness import random_poly, trial_stream
from tropbe.poly import Polynomial, from_roots
from tropbe.rootfind import aberth
from tropbe.rootset import RootSet
from tropbe.xprec import U, NewtonStatus, XComplex, XReal, newton_refine_many

INTRO_ROOTS = [1e6 * (1 + U), 1e-6 + U]


def intro_poly():
    return from_roots(0.2, [1e6, 1e-6])


def to_x(values) -> XComplex:
    """mpmath complex values split into double-double pairs."""
    re = [mpmath.re(v) for v in values]
    im = [mpmath.im(v) for v in values]
    rh = np.array([float(v) for v in re])
    ih = np.array([float(v) for v in im])
    rl = np.array([float(v - h) for v, h in zip(re, rh)])
    il = np.array([float(v - h) for v, h in zip(im, ih)])
    return XComplex(XReal(rh, rl), XReal(ih, il))


def frac_c(z: XComplex, j):
    return (Fraction(float(z.re.hi[j])) + Fraction(float(z.re.lo[j])),
            Fraction(float(z.im.hi[j])) + Fraction(float(z.im.lo[j])))


def cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def exact_expand(lead, roots):
    c = [(Fraction(1), Fraction(0))]
    for r in roots:
        out = [(Fraction(0), Fraction(0))] * (len(c) + 1)
        for i, ci in enumerate(c):
            out[i + 1] = (out[i + 1][0] + ci[0], out[i + 1][1] + ci[1])
            m = cmul(ci, r)
            out[i] = (out[i][0] - m[0], out[i][1] - m[1])
        c = out
    return [cmul(lead, ci) for ci in c]


def fabs(z):
    return math.sqrt(float(z[0] * z[0] + z[1] * z[1]))


# ---------------------------------------------------------------------------
# nbe / ebe / tbe
# ---------------------------------------------------------------------------

def test_nbe_examples():
    c = np.array([1, 1, 1], dtype=complex)
    assert nbe(c, c) == 0
    assert nbe(c, [1 + 1e-8, 1, 1]) == pytest.approx(1e-8 / math.sqrt(3), rel=1e-12)
    p = intro_poly()
    assert nbe(p.coeffs, reconstruct(p, INTRO_ROOTS)) <= 10 * U


def test_ebe_examples():
    c = np.array([1, 1e-9, 1], dtype=complex)
    assert ebe(c, c) == 0
    assert ebe(c, [1, 2e-9, 1]) == pytest.approx(1.0, rel=1e-15)
    assert ebe([1, 0, 1], [1, 1e-30, 1]) == math.inf
    assert ebe([1, 0, 1], [1, 0, 1]) == 0


def test_length_mismatch():
    with pytest.raises(DomainError):
        nbe([1, 2, 3], [1, 2])
    with pytest.raises(DomainError):
        reconstruct(Polynomial([1, 2, 3]), [1.0])


def test_intro_example_ebe_is_large():
    p = intro_poly()
    e = ebe(p.coeffs, reconstruct(p, INTRO_ROOTS))
    assert e == pytest.approx(1.11e-10, rel=1e-2)
    assert tbe(p, INTRO_ROOTS)[0] == pytest.approx(e, rel=1e-12)


def test_tbe_exact_roots():
    assert tbe(Polynomial([2, -3, 1]), [1.0, 2.0])[0] <= 4 * U


def test_tbe_divides_by_r():
    # a = c = 1, b = 1e-6 gives r_1 = 1e6; roots of the perturbed polynomial
    # are computed in 200 bits and carried as double-double values
    mpmath.mp.prec = 200
    b = 1e-6
    bh = mpmath.mpf(b) * (1 + mpmath.mpf(10) ** -10)
    disc = mpmath.sqrt(bh * bh - 4)
    roots = [(-bh + disc) / 2, (-bh - disc) / 2]
    x = RootSet.from_extended(to_x(roots))
    p = Polynomial([1, b, 1])
    t, per = tbe(p, x)
    assert t == pytest.approx(1e-16, rel=1e-3)
    assert per[1].rel_error == pytest.approx(1e-10, rel=1e-3)
    assert per[0].rel_error < 1e-30


def test_tbe_zero_middle_coefficient():
    p = Polynomial([1, 0, 1])
    t, _ = tbe(p, [1j * (1 + 1e-10), -1j])
    # r_1 = 1 here, so the absolute b-error of 1e-10 is not relaxed
    assert t == pytest.approx(1e-10, rel=1e-5)


def test_measure_ordering(rng):
    for trial in range(300):
        d = int(rng.integers(2, 16))
        p = random_poly(d, float(rng.uniform(0, 8)), trial_stream(11, trial))
        x = aberth(p).roots * (1 + 10.0 ** rng.uniform(-16, -6, d))
        rep = analyze(p, x, ("nbe", "ebe", "tbe"))
        assert rep.tbe <= rep.ebe
        assert rep.nbe <= math.sqrt(d + 1) * rep.ebe
        assert all(e.scaled_error <= e.rel_error for e in rep.per_coeff)


def test_analyze_subset_and_unknown():
    p = Polynomial([2, -3, 1])
    rep = analyze(p, [1.0, 2.0], ("nbe",))
    assert rep.nbe == 0 and rep.ebe is None and rep.embe_ub is None
    with pytest.raises(ValueError):
        analyze(p, [1.0, 2.0], ("nbe", "foo"))


# ---------------------------------------------------------------------------
# EMBE upper bound
# ---------------------------------------------------------------------------

def test_embe_exact_cubic():
    b = embe_upper_bound(Polynomial([-6, 11, -6, 1]), [1.0, 2.0, 3.0])
    assert b.available and b.value <= 100 * U
    assert not b.collision


def test_embe_intro_example():
    b = embe_upper_bound(intro_poly(), INTRO_ROOTS)
    # the small root carries an absolute error u, i.e. a relative error 1e6 u
    assert b.available
    assert 1e6 * U / 10 <= b.value <= 10 * 1e6 * U
    assert b.coefficient < 1e-25


def test_embe_doubled_root():
    b = embe_upper_bound(Polynomial([2, -3, 1]), [1.1, 1.1])
    assert not b.collision
    # both copies refine to the root 1, so the forward part is the gap to it
    # and the witness polynomial (x - 1)^2 is off by 1/2 in c_1 relative terms
    assert b.forward == pytest.approx(0.1, rel=1e-12)
    np.testing.assert_allclose(b.witness.roots, [1.0, 1.0])
    assert b.value == pytest.approx(0.5, rel=1e-12)


def test_embe_validity_recheck(rng):
    """The reported bound dominates both inequality families for its witness, exactly."""
    for trial in range(40):
        d = int(rng.integers(2, 8))
        p = random_poly(d, 3.0, trial_stream(23, trial))
        x_hat = aberth(p).roots * (1 + 1e-9 * rng.normal(size=d))
        b = embe_upper_bound(p, x_hat)
        assert b.available
        w = b.witness.extended
        wj = [frac_c(w, j) for j in range(d)]
        for j in range(d):
            xh = (Fraction(x_hat[j].real), Fraction(x_hat[j].imag))
            diff = (xh[0] - wj[j][0], xh[1] - wj[j][1])
            assert fabs(diff) <= b.value * fabs(wj[j]) * (1 + 1e-12)
        lead = (Fraction(p.leading.real), Fraction(p.leading.imag))
        ct = exact_expand(lead, wj)
        for i in range(d):
            ci = (Fraction(p.coeffs[i].real), Fraction(p.coeffs[i].imag))
            diff = (ct[i][0] - ci[0], ct[i][1] - ci[1])
            assert fabs(diff) <= b.value * fabs(ci) * (1 + 1e-12)


def test_embe_unavailable_on_divergence():
    # a real start for x^2 + 1 cannot reach a root
    b = embe_upper_bound(Polynomial([1, 0, 1]), [1.0, -1.0])
    assert not b.available
    assert NewtonStatus.DIVERGED in b.statuses
    assert b.value is None
    rep = analyze(Polynomial([1, 0, 1]), [1.0, -1.0])
    assert rep.embe_status == "unavailable"


# ---------------------------------------------------------------------------
# constructive witnesses
# ---------------------------------------------------------------------------

def test_quadratic_r_b():
    assert quadratic_r_b(Polynomial([1, 1e-8, 1])) == pytest.approx(1e8)
    assert quadratic_r_b(Polynomial([2, -3, 1])) == 1.0
    assert quadratic_r_b(Polynomial([4, 0, 9])) == 6.0


def test_quadratic_witness_r_b_one():
    p = Polynomial([2, -3, 1])
    x = [1.0 + 1e-12, 2.0]
    w = quadratic_witness(p, x)
    assert w.r_b == 1.0
    np.testing.assert_array_equal(w.x_tilde.roots, x)
    assert w.epsilon == pytest.approx(ebe(p.coeffs, reconstruct(p, x)), rel=1e-12)


def test_quadratic_witness_keeps_b():
    p = Polynomial([1, 1e-8, 1])
    x = aberth(p)
    w = quadratic_witness(p, x)
    b = XComplex.of(1e-8)
    assert float((w.b_tilde - b).abs().value()) <= 1e-30 * 1e-8
    t, _ = tbe(p, x)
    assert w.epsilon <= 100 * max(t, U)


def test_quadratic_witness_exact_roots():
    w = quadratic_witness(Polynomial([1, 0, 1]), [1j, -1j])
    assert w.epsilon == 0
    np.testing.assert_array_equal(np.sort_complex(w.x_tilde.roots), [-1j, 1j])


def test_quadratic_witness_requires_quadratic():
    with pytest.raises(DomainError):
        quadratic_witness(Polynomial([-6, 11, -6, 1]), [1, 2, 3])


def test_sqrt5_bound_random_gamma(rng):
    n = 10_000
    rho = np.sqrt(rng.random(n))
    gamma = rho * np.exp(2j * np.pi * rng.random(n))
    gamma = gamma[(gamma != 0) & (np.abs(gamma) < 1)]
    for g in gamma[:2000]:
        p = Polynomial([g, -(g + 1), 1])  # roots gamma and 1
        r_b = quadratic_r_b(p)
        assert (abs(g) + 1) / abs(g + 1) / r_b <= math.sqrt(5) + 1e-9


def test_general_witness_all_kept():
    p = Polynomial([2, -3, 1])
    x = [1.0 + 1e-10, 2.0 - 1e-10]
    w = general_witness(p, x)
    assert w.kept.all()
    np.testing.assert_array_equal(w.tilde_f.coeffs, reconstruct(p, x).to_complex())
    assert w.forward <= 1e-25
    assert w.epsilon == pytest.approx(ebe(p.coeffs, reconstruct(p, x)), rel=1e-6)


def test_general_witness_reverts_to_original():
    # r_1 = 1e8 exceeds the cap, and {i, -i} reproduces c_0 and c_2 exactly
    p = Polynomial([1, 1e-8, 1])
    w = general_witness(p, [1j, -1j], r_cap=1e3)
    assert list(w.kept) == [True, False, True]
    assert w.tilde_f == p
    assert w.coefficient <= 1e-25
    assert w.forward == pytest.approx(5e-9, rel=1e-6)


def test_general_witness_monte_carlo():
    ok = 0
    for trial in range(100):
        p = random_poly(10, 6.0, trial_stream(31, trial))
        x = aberth(p)
        t, _ = tbe(p, x)
        if general_witness(p, x).epsilon <= 1e3 * t:
            ok += 1
    assert ok >= 95


# ---------------------------------------------------------------------------
# first-order perturbation
# ---------------------------------------------------------------------------

def test_perturbation_examples():
    p = Polynomial([-1, 0, 1])
    assert perturbation_estimate(p, 1.0, [0, 0, 0]) == 0
    assert perturbation_estimate(p, 1.0, [1e-8]) == pytest.approx(-5e-9, rel=1e-12)
    with pytest.raises(SingularDerivativeError):
        perturbation_estimate(p, 0.0, [1e-8])
    with pytest.raises(DomainError):
        perturbation_estimate(p, 1.0, [0, 0, 0, 1])


def test_perturbation_against_rerooting(rng):
    for trial in range(30):
        d = int(rng.integers(2, 10))
        roots = 10.0 ** rng.uniform(-1, 1, d) * np.exp(2j * np.pi * (np.arange(d) / d + 0.05 * rng.random(d)))
        p = from_roots(1, roots)
        delta = 1e-9 * np.abs(p.coeffs) * np.exp(2j * np.pi * rng.random(d + 1))
        delta[-1] = 0
        q = Polynomial(p.coeffs + delta)
        exact = newton_refine_many(p.coeffs, roots, ).root.to_complex()
        moved = newton_refine_many(q.coeffs, exact).root.to_complex()
        for j in range(d):
            est = perturbation_estimate(p, exact[j], delta)
            shift = moved[j] - exact[j]
            # second-order agreement
            assert abs(est - shift) <= 1e-4 * abs(shift) + 1e-20
