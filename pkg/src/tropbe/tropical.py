"""Tropical roots of a complex polynomial via the upper hull of (i, log|c_i|).

Logarithms are natural throughout.  Tropical roots are kept in log form;
``np.exp(t.tau)`` gives the predicted root moduli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .poly import Polynomial, elem_sym_abs


@dataclass(frozen=True)
class TropicalData:
    """Everything derived from the lifted Newton polytope of one polynomial.

    ``tau[i - 1]`` is the tropical root tau_i for i = 1..d; ``r[i]`` is the
    relaxation constant for coefficient i = 0..d.
    """

    valuations: np.ndarray
    hull_vertices: tuple
    tau: np.ndarray
    r: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.valuations) - 1

    @property
    def subdivision(self) -> list:
        b = self.hull_vertices
        return list(zip(b[:-1], b[1:]))

    @property
    def multiplicities(self) -> list:
        return [hi - lo for lo, hi in self.subdivision]

    def blocks(self):
        """(tau, multiplicity) per hull segment, left to right."""
        return [(float(self.tau[hi - 1]), hi - lo) for lo, hi in self.subdivision]

    def is_vertex(self, i: int) -> bool:
        return i in self.hull_vertices


def valuations(p: Polynomial) -> np.ndarray:
    c = p.coeffs
    if p.degree < 1:
        raise DomainError("tropical analysis needs degree >= 1")
    if c[0] == 0 or c[-1] == 0:
        raise DomainError("c_0 and c_d must be nonzero; deflate zero roots first")
    a = np.abs(c)
    with np.errstate(divide="ignore"):
        return np.log(a)


def upper_hull(v) -> tuple:
    """Indices of the upper concave chain over the finite points (i, v_i).

    Monotone-chain scan from left to right.  A point lying exactly on the
    segment between its neighbours is removed, so segments are maximal.
    """
    v = np.asarray(v, dtype=float)
    if not (np.isfinite(v[0]) and np.isfinite(v[-1])):
        raise DomainError("end valuations must be finite")
    hull: list[int] = []
    for i in range(len(v)):
        if not np.isfinite(v[i]):
            continue
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # b is popped when it lies on or below the chord a -> i
            if (v[b] - v[a]) * (i - a) <= (v[i] - v[a]) * (b - a):
                hull.pop()
            else:
                break
        hull.append(i)
    return tuple(hull)


def tropical_roots(p: Polynomial) -> TropicalData:
    v = valuations(p)
    beta = upper_hull(v)
    d = p.degree
    tau = np.empty(d)
    for lo, hi in zip(beta[:-1], beta[1:]):
        tau[lo:hi] = (v[lo] - v[hi]) / (hi - lo)
    r = _r_values(v, beta, tau)
    return TropicalData(v, beta, tau, r)


def _r_values(v, beta, tau) -> np.ndarray:
    r = np.ones(len(v))
    for lo, hi in zip(beta[:-1], beta[1:]):
        for i in range(lo + 1, hi):
            t = tau[i - 1]
            logr = v[hi] + (hi - i) * t
            if np.isfinite(v[i]):
                logr -= v[i]
            r[i] = math.exp(logr) if logr < 709.0 else math.inf
    # rounding on nearly collinear points, and the absolute branch for zero
    # coefficients, can dip below one
    return np.maximum(r, 1.0)


def r_constants(p: Polynomial, t: TropicalData | None = None) -> np.ndarray:
    if t is None:
        t = tropical_roots(p)
    return t.r


def assumption_w(t: TropicalData, moduli) -> np.ndarray:
    """w_i = log sigma_{d-i}(moduli) - (tau_{i+1} + ... + tau_d), i = 0..d-1."""
    m = np.sort(np.asarray(moduli, dtype=float))
    d = t.degree
    if m.size != d:
        raise DomainError(f"expected {d} moduli, got {m.size}")
    if np.any(m <= 0):
        raise DomainError("moduli must be positive")
    sig = elem_sym_abs(m)
    tail = np.concatenate([np.cumsum(t.tau[::-1])[::-1], [0.0]])  # tail[i] = sum_{k>i} tau_k
    return np.array([sig[d - i].log() - tail[i] for i in range(d)])
