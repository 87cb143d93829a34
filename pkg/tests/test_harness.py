import hashlib
import math

import numpy as np
import pytest

from tropbe.harness import (EXP1_HEADER, EXP2_HEADER, ExperimentConfig, exp1_summary, exp1_trial,
                            exp2_summary, exp2_trial, experiment1, experiment2, random_poly,
                            trial_stream, write_experiment1, write_experiment2)
from tropbe.poly import Polynomial, from_roots
from tropbe.xprec import U


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_config_validation():
    for bad in ({"d": 0}, {"k": -1}, {"trials": 0}, {"seed": -1}):
        with pytest.raises(ValueError):
            ExperimentConfig(**bad)


def test_random_poly_k_zero():
    p = random_poly(15, 0.0, trial_stream(1, 2))
    np.testing.assert_allclose(np.abs(p.coeffs), 1.0, rtol=1e-15)


def test_random_poly_deterministic():
    a = random_poly(20, 8, trial_stream(3, 17))
    b = random_poly(20, 8, trial_stream(3, 17))
    c = random_poly(20, 8, trial_stream(3, 18))
    assert a == b
    assert a != c


def test_random_poly_uniform_exponents():
    e = np.concatenate([np.log10(np.abs(random_poly(20, 8, trial_stream(0, t)).coeffs))
                        for t in range(1000)])
    assert abs(e.mean()) <= 0.3
    assert e.min() >= -8 - 1e-12 and e.max() <= 8 + 1e-12
    assert (e <= -7.5).any() and (e >= 7.5).any()


def test_exp1_hook_exact_integer_roots():
    cfg = ExperimentConfig(trials=1)
    rec = exp1_trial(cfg, 0, poly=from_roots(1, [1, 2, 3, 4, 5]))
    assert rec.tbe <= 1e3 * U
    assert rec.embe_ub is not None and rec.embe_ub <= 1e3 * U
    assert rec.d == 5


def test_exp2_linear_ratio_is_one():
    cfg = ExperimentConfig(trials=1)
    recs = exp2_trial(cfg, 0, poly=Polynomial([3 - 1j, 2 + 0.5j]))
    assert len(recs) == 1
    assert recs[0].ratio == pytest.approx(1.0, rel=1e-15)


def test_exp2_hull_oracle_quadratic():
    # tropical moduli of x^2 - 3x + 2 are 2/3 and 3 against true moduli 1 and 2
    recs = exp2_trial(ExperimentConfig(trials=1), 0, poly=Polynomial([2, -3, 1]))
    np.testing.assert_allclose([r.ratio for r in recs], [2 / 3, 3 / 2], rtol=1e-14)


def test_exp1_completeness_and_determinism(tmp_path):
    cfg = ExperimentConfig(d=8, k=4, trials=12, seed=5)
    a = experiment1(cfg)
    assert len(a) == 12 and [r.trial for r in a] == list(range(12))
    pa = write_experiment1(a, tmp_path / "a")
    pb = write_experiment1(experiment1(cfg), tmp_path / "b")
    assert digest(pa) == digest(pb)
    assert pa.read_text().splitlines()[0] == ",".join(EXP1_HEADER)
    assert (tmp_path / "a" / "exp1.plt").exists()


def test_parallel_matches_serial(tmp_path):
    cfg = ExperimentConfig(d=8, k=4, trials=10, seed=9)
    par = ExperimentConfig(d=8, k=4, trials=10, seed=9, jobs=2)
    assert experiment1(cfg) == experiment1(par)
    assert experiment2(cfg) == experiment2(par)


def test_exp2_rows(tmp_path):
    cfg = ExperimentConfig(d=6, k=3, trials=15, seed=1)
    recs = experiment2(cfg)
    trials = {r.trial for r in recs}
    for t in trials:
        assert [r.root_index for r in recs if r.trial == t] == list(range(6))
    ratios = np.array([r.ratio for r in recs])
    assert np.all(np.isfinite(ratios)) and np.all(ratios > 0)
    path = write_experiment2(recs, tmp_path)
    assert path.read_text().splitlines()[0] == ",".join(EXP2_HEADER)
    assert len(path.read_text().splitlines()) == len(recs) + 1


def test_summaries():
    cfg = ExperimentConfig(d=6, k=3, trials=5, seed=1)
    s = exp1_summary(experiment1(cfg))
    assert s["trials"] == 5 and s["available"] + s["unavailable"] == 5
    s2 = exp2_summary(experiment2(cfg))
    assert 0 <= s2["fraction_within"] <= 1
    assert math.isnan(exp2_summary([])["fraction_within"])
