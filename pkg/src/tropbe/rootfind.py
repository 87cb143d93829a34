"""Aberth-Ehrlich simultaneous iteration seeded by tropical roots."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .poly import Polynomial
from .rootset import Provenance, RootSet
from .tropical import TropicalData, tropical_roots
from .xprec import U

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
_PHASE_OFFSET = 0.4  # keeps guesses off the real axis
_COLLIDE = 1e-30
_NUDGE = 1e-6


@dataclass(frozen=True)
class AberthConfig:
    max_iter: int = 200
    rel_tol: float = 4 * U
    restart_phases: int = 3

    def __post_init__(self):
        if self.rel_tol < U:
            raise ValueError("rel_tol must be at least u")
        if self.max_iter < 1 or self.restart_phases < 1:
            raise ValueError("max_iter and restart_phases must be positive")


def initial_guesses(p: Polynomial, t: TropicalData | None = None) -> np.ndarray:
    """m_l points of modulus exp(tau) per hull segment, spread in phase."""
    if t is None:
        t = tropical_roots(p)
    out = []
    for ell, (tau, m) in enumerate(t.blocks()):
        phase = _PHASE_OFFSET + GOLDEN_ANGLE * ell + 2.0 * math.pi * np.arange(m) / m
        out.append(math.exp(tau) * np.exp(1j * phase))
    return np.concatenate(out)


def _newton_ratios(c: np.ndarray, x: np.ndarray):
    """f/f' and a relative residual |f| / sum |c_i x^i| at each x.

    Points outside the unit disk use the reversed polynomial so nothing
    overflows.
    """
    d = c.size - 1
    ratio = np.empty_like(x)
    rel = np.empty(x.size)
    big = np.abs(x) > 1.0

    def horner(cs, pt):
        f = np.full(pt.shape, cs[-1], dtype=complex)
        fp = np.zeros(pt.shape, dtype=complex)
        s = np.full(pt.shape, abs(cs[-1]))
        ap = np.abs(pt)
        for ci in cs[-2::-1]:
            fp = fp * pt + f
            f = f * pt + ci
            s = s * ap + abs(ci)
        return f, fp, s

    with np.errstate(all="ignore"):
        if (~big).any():
            xs = x[~big]
            f, fp, s = horner(c, xs)
            ratio[~big] = f / fp
            rel[~big] = np.abs(f) / s
        if big.any():
            xb = x[big]
            y = 1.0 / xb
            g, gp, s = horner(c[::-1], y)
            ratio[big] = xb * g / (d * g - y * gp)
            rel[big] = np.abs(g) / s
    return ratio, rel


def _separate(x: np.ndarray) -> np.ndarray:
    """Nudge iterates that (nearly) coincide; deterministic phase per index."""
    n = x.size
    for j in range(n):
        for k in range(j):
            if abs(x[j] - x[k]) <= _COLLIDE * abs(x[j]):
                x[j] *= 1.0 + _NUDGE * np.exp(1j * (GOLDEN_ANGLE * (j + 1)))
    return x


def aberth(p: Polynomial, guesses=None, cfg: AberthConfig = AberthConfig()) -> RootSet:
    """All roots of ``p`` by Jacobi-style Aberth sweeps.

    A root is frozen once its correction satisfies ``|dx| <= rel_tol |x|`` or
    its relative residual ``|f(x)| / sum |c_i x^i|`` falls to the rounding
    level ``4 d u`` (after taking that last correction).  Roots still moving
    after ``max_iter`` sweeps get their phases rotated and the sweep restarts,
    up to ``restart_phases`` times.
    """
    c = np.asarray(p.coeffs, dtype=complex)
    d = p.degree
    if d < 1:
        raise ValueError("degree must be at least 1")
    if d == 1:
        return RootSet(np.array([-c[0] / c[1]]), Provenance.COMPUTED)
    x = initial_guesses(p) if guesses is None else np.array(guesses, dtype=complex)
    if x.size != d:
        raise ValueError(f"need {d} initial guesses, got {x.size}")
    x = _separate(x.copy())
    active = np.ones(d, dtype=bool)
    res_tol = 4.0 * d * U

    for phase in range(cfg.restart_phases):
        for _ in range(cfg.max_iter):
            if not active.any():
                break
            ratio, rel = _newton_ratios(c, x)
            diff = x[:, None] - x[None, :]
            np.fill_diagonal(diff, 1.0)
            with np.errstate(all="ignore"):
                inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            with np.errstate(all="ignore"):
                step = ratio / (1.0 - ratio * s)
            idx = np.flatnonzero(active)
            bad = ~np.isfinite(step[idx])
            good = idx[~bad]
            new = x.copy()
            new[good] = x[good] - step[good]
            done = (np.abs(step[good]) <= cfg.rel_tol * np.abs(new[good])) | (rel[good] <= res_tol)
            active[good[done]] = False
            for j in idx[bad]:
                new[j] = x[j] * (1.0 + _NUDGE * np.exp(1j * GOLDEN_ANGLE * (j + 1)))
            x = _separate(new)
        if not active.any():
            return RootSet(x, Provenance.COMPUTED)
        # restart the stragglers with rotated phases
        x[active] *= np.exp(1j * GOLDEN_ANGLE * (phase + 1))
    _, rel = _newton_ratios(c, x)
    raise ConvergenceError(
        f"Aberth iteration did not converge for {int(active.sum())} of {d} roots",
        best=x, residuals=rel)
