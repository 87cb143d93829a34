"""Seeded random polynomials and the two numerical experiments.

Each trial draws from its own Philox stream keyed by (seed, trial), so runs
are reproducible bit for bit regardless of how trials are scheduled.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .backward_error import embe_upper_bound, tbe
from .errors import ConvergenceError
from .poly import Polynomial
from .rootfind import AberthConfig, aberth
from .tropical import tropical_roots
from .xprec import NewtonConfig, NewtonStatus, U, newton_refine_many

log = logging.getLogger(__name__)

EXP1_HEADER = ["trial", "seed", "d", "k", "tbe", "embe_ub", "embe_status", "collision"]
EXP2_HEADER = ["trial", "root_index", "exp_tau_over_abs_root"]


@dataclass(frozen=True)
class ExperimentConfig:
    d: int = 20
    k: float = 8.0
    trials: int = 1000
    seed: int = 0
    aberth: AberthConfig = field(default_factory=AberthConfig)
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    jobs: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("degree must be positive")
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed, trial]))


def random_poly(d: int, k: float, stream: np.random.Generator) -> Polynomial:
    """Coefficients 10**e * exp(i phi) with e ~ U[-k, k], phi ~ U[0, 2 pi)."""
    e = stream.uniform(-k, k, d + 1)
    phi = stream.uniform(0.0, 2.0 * math.pi, d + 1)
    return Polynomial(10.0 ** e * np.exp(1j * phi))


@dataclass(frozen=True)
class Exp1Record:
    trial: int
    seed: int
    d: int
    k: float
    tbe: float
    embe_ub: float | None
    collision: bool

    @property
    def embe_status(self) -> str:
        return "ok" if self.embe_ub is not None else "unavailable"

    def row(self):
        embe = "" if self.embe_ub is None else repr(self.embe_ub)
        return [self.trial, self.seed, self.d, repr(self.k), repr(self.tbe), embe,
                self.embe_status, int(self.collision)]


@dataclass(frozen=True)
class Exp2Record:
    trial: int
    root_index: int
    ratio: float

    def row(self):
        return [self.trial, self.root_index, repr(self.ratio)]


def exp1_trial(cfg: ExperimentConfig, trial: int, poly: Polynomial | None = None) -> Exp1Record:
    """One trial of experiment 1; ``poly`` overrides the random draw (test hook)."""
    p = poly if poly is not None else random_poly(cfg.d, cfg.k, trial_stream(cfg.seed, trial))
    try:
        x_hat = aberth(p, cfg=cfg.aberth)
    except ConvergenceError as exc:
        log.warning("trial %d: rootfinding failed (%s); using best iterate", trial, exc)
        x_hat = exc.best
    t_val, _ = tbe(p, x_hat)
    bound = embe_upper_bound(p, x_hat, cfg.newton)
    return Exp1Record(trial, cfg.seed, p.degree, cfg.k, t_val, bound.value, bound.collision)


def exp2_trial(cfg: ExperimentConfig, trial: int, poly: Polynomial | None = None) -> list[Exp2Record]:
    p = poly if poly is not None else random_poly(cfg.d, cfg.k, trial_stream(cfg.seed, trial))
    try:
        x = aberth(p, cfg=cfg.aberth)
    except ConvergenceError as exc:
        log.warning("trial %d skipped: %s", trial, exc)
        return []
    ref = newton_refine_many(p.coeffs, x.roots, cfg.newton)
    if any(s is NewtonStatus.DIVERGED for s in ref.status):
        log.warning("trial %d skipped: reference refinement diverged", trial)
        return []
    moduli = np.sort(np.abs(ref.root.to_complex()))
    trop = np.sort(tropical_roots(p).tau)
    ratio = np.exp(trop - np.log(moduli))
    return [Exp2Record(trial, j, float(ratio[j])) for j in range(ratio.size)]


def _run(fn, cfg: ExperimentConfig):
    trials = range(cfg.trials)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            # map preserves trial order whatever the completion order
            return list(pool.map(fn, [cfg] * cfg.trials, trials, chunksize=8))
    return [fn(cfg, t) for t in trials]


def experiment1(cfg: ExperimentConfig) -> list[Exp1Record]:
    return _run(exp1_trial, cfg)


def experiment2(cfg: ExperimentConfig) -> list[Exp2Record]:
    return [rec for recs in _run(exp2_trial, cfg) for rec in recs]


def exp1_summary(records, factor: float = 100.0) -> dict:
    valid = [r for r in records if r.embe_ub is not None]
    ok = sum(r.embe_ub <= factor * max(r.tbe, U) for r in valid)
    return {
        "trials": len(records),
        "available": len(valid),
        "unavailable": len(records) - len(valid),
        "collisions": sum(r.collision for r in records),
        "within_factor": ok,
        "fraction_within": ok / len(valid) if valid else float("nan"),
    }


def exp2_summary(records, band: float = 1.1) -> dict:
    ratios = np.array([r.ratio for r in records])
    inside = np.count_nonzero((ratios >= 1.0 / band) & (ratios <= band))
    return {
        "ratios": ratios.size,
        "trials": len({r.trial for r in records}),
        "within_band": int(inside),
        "fraction_within": inside / ratios.size if ratios.size else float("nan"),
    }


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def write_csv(path, header, records):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in records:
            w.writerow(r.row())


EXP1_PLOT = """\
# TBE against the EMBE upper bound, one point per trial
set datafile separator ","
set key off
set logscale xy
set format x "10^{%L}"
set format y "10^{%L}"
set xlabel "TBE"
set ylabel "EMBE upper bound"
set terminal pngcairo size 800,600
set output "exp1.png"
plot "exp1.csv" every ::1 using 5:($7 eq "ok" ? $6 : 1/0) with points pt 7 ps 0.5, \\
     x with lines lw 2
"""

EXP2_PLOT = """\
# histogram of exp(tau_i) / |x_i|
set datafile separator ","
set key off
binwidth = 0.02
bin(x) = binwidth * floor(x / binwidth) + binwidth / 2
set boxwidth binwidth
set style fill solid 0.6
set xlabel "exp(tau_i) / |x_i|"
set ylabel "count"
set terminal pngcairo size 800,600
set output "exp2.png"
plot "exp2.csv" every ::1 using (bin($3)):(1.0) smooth frequency with boxes
"""


def write_experiment1(records, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "exp1.csv", EXP1_HEADER, records)
    (out / "exp1.plt").write_text(EXP1_PLOT)
    return out / "exp1.csv"


def write_experiment2(records, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "exp2.csv", EXP2_HEADER, records)
    (out / "exp2.plt").write_text(EXP2_PLOT)
    return out / "exp2.csv"
