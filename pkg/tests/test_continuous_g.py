import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import expon, norm, uniform

from insider_arb.continuous_g import (BrownianMarket, PartitionSpec, PiecewiseControl, StabilityError,
                                      ThetaMarket, bs_insider_experiment, chain_rule_check,
                                      differential_entropy, entropy_decomposition_check, interval_grid,
                                      log_density, make_partition, nupbr_criterion_probe, random_controls,
                                      time_grid, truncated_entropy, ui_bound_check)
from insider_arb.continuous_g._kernels import interval_prob, log_gradient
from insider_arb.errors import DomainError
from insider_arb.poisson_market import MarketParams, simulate_ensemble

GAUSS_H = 0.5 * math.log(2 * math.pi * math.e)


# -- partitions

def test_equal_mass_partition():
    p = make_partition(norm(), 8)
    assert p.probs == (0.125,) * 8
    assert p.entropy == pytest.approx(math.log(8), abs=1e-15)
    assert p.covers_line
    with pytest.raises(DomainError):
        make_partition(norm(), 0)
    with pytest.raises(DomainError):
        make_partition(norm(), 4, "bogus")


def test_partition_validation():
    with pytest.raises(DomainError):
        PartitionSpec((0.0, 0.0, 1.0), (0.5, 0.5), "equal_width", 1.0)
    with pytest.raises(DomainError):
        PartitionSpec((0.0, 1.0), (0.4,), "equal_width", 1.0)


def test_closed_partition_adds_tails():
    p = make_partition(norm(), 10, "equal_width", (-1.0, 1.0))
    c = p.closed(norm())
    assert c.n == 12 and c.covers_line
    assert c.mass == pytest.approx(1.0, abs=1e-15)


def test_differential_entropy():
    assert differential_entropy(norm()) == pytest.approx(GAUSS_H, abs=1e-10)
    assert differential_entropy(norm(scale=3.0)) == pytest.approx(GAUSS_H + math.log(3.0), abs=1e-10)
    assert differential_entropy(expon()) == pytest.approx(1.0, abs=1e-10)


def test_entropy_split_residual_decreases():
    res = [abs(entropy_decomposition_check(norm(), make_partition(norm(), n, "equal_width")).residual)
           for n in (8, 32, 128, 512)]
    assert all(b < a for a, b in zip(res, res[1:]))
    assert res[-1] <= 1e-3
    u = make_partition(uniform(), 16, "equal_width", (0.0, 1.0))
    assert entropy_decomposition_check(uniform(), u).residual == 0.0


@given(st.integers(1, 200))
def test_chain_rule(n):
    h_n, h_2n, ok = chain_rule_check(make_partition(norm(), 2 * n))
    assert ok and h_2n == pytest.approx(h_n + math.log(2), abs=1e-12)


@given(st.floats(-8, 8), st.floats(0.01, 5))
def test_gaussian_helpers(lo, width):
    hi = lo + width
    if lo >= 0:
        mass = norm.sf(lo) - norm.sf(hi)
    elif hi <= 0:
        mass = norm.cdf(hi) - norm.cdf(lo)
    else:
        mass = 1.0 - norm.cdf(lo) - norm.sf(hi)
    assert interval_prob(lo, hi) == pytest.approx(mass, rel=1e-9, abs=1e-300)
    ref = (norm.pdf(lo) - norm.pdf(hi)) / mass
    if math.isfinite(ref):
        assert log_gradient(lo, hi) == pytest.approx(ref, rel=1e-7, abs=1e-12)


def test_log_gradient_far_tail():
    # beyond the double-precision range of Phi the ratio is still finite and close to the Mills ratio
    assert log_gradient(40.0, math.inf) == pytest.approx(40.0 + 1 / 40.0, rel=1e-3)
    assert log_gradient(-math.inf, -40.0) == pytest.approx(-(40.0 + 1 / 40.0), rel=1e-3)


# -- grids and the Brownian experiment

def test_time_grid():
    g = time_grid(1.0, 512)
    assert g.times[0] == 0.0 and g.times[-1] == 1.0
    assert np.all(np.diff(g.times) > 0)
    assert g.delta == pytest.approx(1e-8, rel=1e-9)
    u = time_grid(1.0, 64, kind="uniform")
    assert u.n_int == 56 and u.delta == pytest.approx(8 / 64)
    with pytest.raises(StabilityError):
        time_grid(1.0, 16)
    with pytest.raises(StabilityError):
        time_grid(1.0, 64, delta=3 / 64, kind="uniform")
    with pytest.raises(StabilityError):
        time_grid(1.0, 64, delta=0.01, kind="uniform")
    with pytest.raises(DomainError):
        time_grid(1.0, 7)


def test_truncated_entropy_limits():
    p = make_partition(norm(), 4)
    assert truncated_entropy(p, 1.0, 1e-10) == pytest.approx(math.log(4), abs=1e-3)
    assert truncated_entropy(p, 1.0, 0.999) < 0.01
    assert truncated_entropy(make_partition(norm(), 1), 1.0, 0.5) == 0.0


def test_single_cell_value_is_zero():
    exp = bs_insider_experiment(BrownianMarket(), 1, n_paths=100, n_steps=512, seed=1)
    assert exp.row(1).value.mean == 0.0
    assert np.all(exp.values == 0.0)


def test_brownian_small_run():
    exp = bs_insider_experiment(BrownianMarket(), [2, 4], n_paths=4000, n_steps=512, seed=2)
    for r in exp.rows:
        assert r.passed, r.record()
    inc = exp.paired_increment(0, 1)
    assert inc.mean > 3 * inc.se
    for _, est in exp.density_checks:
        assert est.within(1.0, 4.0)


def test_brownian_thread_invariance():
    a = bs_insider_experiment(BrownianMarket(), 4, n_paths=500, n_steps=512, seed=3, threads=1)
    b = bs_insider_experiment(BrownianMarket(), 4, n_paths=500, n_steps=512, seed=3, threads=16)
    assert np.array_equal(a.values, b.values)


def test_brownian_validation():
    with pytest.raises(DomainError):
        BrownianMarket(sigma=0.0)
    with pytest.raises(DomainError):
        bs_insider_experiment(BrownianMarket(), 4, n_paths=1, n_steps=512, seed=0)


# -- theta market

def test_theta_control_validation():
    m = ThetaMarket(0.3)
    with pytest.raises(DomainError):
        ThetaMarket(1.0)
    with pytest.raises(DomainError):
        PiecewiseControl((0.0, 0.5), (1.0, 2.0))
    c = PiecewiseControl((0.0, 0.5, 1.0), (0.5, 2.0))
    assert list(c.at([0.0, 0.49, 0.5, 1.0])) == [0.5, 0.5, 2.0, 2.0]
    assert c.feasible(m.theta)
    assert not PiecewiseControl.constant(4.0, 1.0).feasible(m.theta)
    ens = simulate_ensemble(MarketParams(1.0), 10, seed=1)
    with pytest.raises(DomainError):
        log_density(m, PiecewiseControl.constant(4.0, 1.0), ens)


def test_theta_unit_control_is_trivial():
    m = ThetaMarket(0.4)
    ens = simulate_ensemble(MarketParams(1.0), 200, seed=1)
    assert np.allclose(log_density(m, PiecewiseControl.constant(1.0, 1.0), ens), 0.0, atol=1e-14)


@given(st.floats(0.05, 0.95), st.integers(0, 2**31))
def test_theta_bound_pathwise(theta, seed):
    m = ThetaMarket(theta)
    ctrls = random_controls(m, 5, np.random.default_rng(seed))
    r = ui_bound_check(m, ctrls, 300, seed)
    assert r.violations == 0 and r.max_ratio <= 1.0


def test_theta_density_mean_one():
    m = ThetaMarket(0.3)
    ctrls = random_controls(m, 3, np.random.default_rng(0))
    r = ui_bound_check(m, ctrls, 40_000, 5)
    ens = simulate_ensemble(MarketParams(1.0), 40_000, 5)
    for c, md in zip(ctrls, r.mean_density):
        z = np.exp(log_density(m, c, ens))
        assert abs(md - 1.0) <= 4 * z.std() / math.sqrt(z.size)


# -- probe

def test_probe_semantics():
    sig = np.array([0, 0, 1, 1, 1, 2])
    fam = {"zero": np.zeros(6)}
    res = nupbr_criterion_probe(sig, fam, [(-0.5, 1.0), (0.5, 1.0), (5.0, 1.0)], constant=3.0)
    assert [r.skipped for r in res.rows] == [False, False, True]
    r0 = res.rows[0]
    assert r0.prob == pytest.approx(2 / 6)
    assert r0.lhs == 0.0
    assert r0.implied_c == pytest.approx(-math.log(2 / 6))
    assert r0.holds == (0.0 >= -r0.prob * math.log(r0.prob) - 3.0 * r0.prob)
    with pytest.raises(DomainError):
        nupbr_criterion_probe(sig, {}, [(0.0, 1.0)], 1.0)
    assert interval_grid([0.0], [1.0, 0.5]) == [(-0.5, 1.0), (-0.25, 0.5)]
