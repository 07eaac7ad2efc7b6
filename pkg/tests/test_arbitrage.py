import math

import numpy as np
import pytest

from insider_arb.arbitrage import (Verdict, classify_arbitrage, first_jump_race, mc_emm_probe,
                                   replicate_buy_and_hold, replicate_ensemble, skellam_probe_target,
                                   superhedge_indicator_public, superhedge_insider_combine)
from insider_arb.errors import CoverageError, InvariantError
from insider_arb.kernels import skellam_pmf
from insider_arb.poisson_market import JumpPath, TiltControls


def test_public_indicator_price():
    assert superhedge_indicator_public(-3) == 1.0
    assert superhedge_indicator_public(0) == 1.0
    assert superhedge_indicator_public(2) == math.exp(-2)


def test_insider_price_map_and_verdict():
    pm = superhedge_insider_combine(horizon=1.0)
    assert pm.mass >= 1 - 1e-10
    assert all(pm[g] == 1.0 for g in range(pm.low, 1))
    assert pm[3] == math.exp(-3)
    v = classify_arbitrage(pm)
    assert v.verdict == Verdict.OPTIMAL
    assert min(v.witnesses) == 1


def test_verdict_classes():
    assert classify_arbitrage({0: 1.0, 1: 1.0}).verdict == Verdict.NONE
    assert classify_arbitrage({0: 0.5, 1: 0.2}).verdict == Verdict.STRONG
    with pytest.raises(InvariantError):
        classify_arbitrage({0: 1.5})
    with pytest.raises(InvariantError):
        classify_arbitrage({})


def test_coverage_error():
    with pytest.raises(CoverageError):
        superhedge_insider_combine(low=-1, high=1, horizon=1.0)


def test_buy_and_hold():
    p = JumpPath((0.1, 0.2, 0.7), (0.5,), 1.0)
    r = replicate_buy_and_hold(p)
    assert r.initial_cost == math.exp(-2)
    assert abs(r.terminal_wealth - 1.0) <= 1e-12
    assert r.min_wealth == pytest.approx(math.exp(-2))
    cost, w = replicate_ensemble(np.arange(-10, 11))
    assert np.max(np.abs(w - 1.0)) <= 1e-12
    assert np.array_equal(cost, np.exp(-np.arange(-10, 11.0)))


def test_emm_probe_lower_bound():
    for x in (-1, 0, 1):
        pr = mc_emm_probe(x, n_paths=50_000, seed=3)
        assert pr.weak_duality_ok
        assert pr.estimate.mean > 0.5 * pr.price
    # the unit-rate reference measure is not a martingale measure; the (1, e) one is
    pr = mc_emm_probe(1, controls=TiltControls.constant(1.0), n_paths=50_000, seed=4)
    assert pr.estimate.within(skellam_probe_target(1, 1.0), 4.0)
    assert skellam_probe_target(0, 1.0) == pytest.approx(skellam_pmf(0, 1.0, math.e))


def test_first_jump_race():
    race = first_jump_race(50_000, seed=6)
    assert race.first_n1.within(1 / (1 + math.e), 4.0)
    assert race.censored == 0
    assert np.all(race.ratios > 0)
