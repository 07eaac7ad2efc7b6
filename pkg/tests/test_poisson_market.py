import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from insider_arb.errors import DomainError
from insider_arb.kernels import skellam_pmf, stream
from insider_arb.poisson_market import (JumpPath, MarketParams, PathEnsemble, TiltControls, conditional_density,
                                        density_bessel, first_passage, first_passage_path, insider_intensities,
                                        recursion_residual, simulate_ensemble, simulate_passage, simulate_path,
                                        simulate_tilted_ensemble, simulate_tilted_path, state, terminal_log_pmf)

times = st.lists(st.floats(0.001, 0.999), max_size=8, unique=True).map(sorted)


@given(times, times)
def test_path_text_round_trip(a, b):
    p = JumpPath(tuple(a), tuple(b), 1.0)
    q = JumpPath.from_text(p.to_text())
    assert q == p
    assert p.n_terminal == len(a) - len(b)


def test_path_validation_and_state():
    with pytest.raises((DomainError, ValueError)):
        JumpPath((0.5, 0.2), (), 1.0)
    with pytest.raises((DomainError, ValueError)):
        JumpPath((1.5,), (), 1.0)
    p = JumpPath((0.2, 0.6), (0.4,), 1.0)
    assert state(p, 0.0) == (0, 0, 0, 1.0)
    assert state(p, 0.4) == (1, 1, 0, 1.0)
    n1, n2, n, s = state(p, 0.7)
    assert (n1, n2, n) == (2, 1, 1) and s == pytest.approx(math.e)


def test_ensemble_matches_single_paths():
    params = MarketParams(2.0, 1.0, math.e)
    ens = simulate_ensemble(params, 200, seed=5, first_index=30)
    for i in range(200):
        assert ens.path(i) == simulate_path(params, stream(5, 30 + i))
    again = PathEnsemble.from_paths([ens.path(i) for i in range(200)])
    assert np.array_equal(again.n_terminal, ens.n_terminal)


def test_ensemble_thread_invariance():
    params = MarketParams(1.0)
    outs = [simulate_ensemble(params, 5000, seed=3, threads=t) for t in (1, 4, 16)]
    for o in outs[1:]:
        assert np.array_equal(o.times, outs[0].times) and np.array_equal(o.marks, outs[0].marks)


def test_ensemble_terminal_law(small_ensemble):
    n = small_ensemble.n_terminal
    for x in (-1, 0, 1):
        p = skellam_pmf(x, 1.0, 1.0)
        assert abs(np.mean(n == x) - p) <= 4 * math.sqrt(p * (1 - p) / n.size)


@given(st.integers(-6, 6), st.integers(-6, 6), st.floats(1e-6, 5.0))
def test_intensity_difference_identity(n_T, n_t, tau):
    pair = insider_intensities(0.0, n_t, n_T, tau)
    y = n_T - n_t
    assert pair.lambda1 > 0 and pair.lambda2 > 0
    assert pair.lambda1 - pair.lambda2 == pytest.approx(y / tau, rel=1e-9, abs=1e-9 * max(1.0, abs(y / tau)))


def test_intensities_at_horizon_and_symmetry():
    with pytest.raises(DomainError):
        insider_intensities(1.0, 0, 0, 1.0)
    a = insider_intensities(0.3, 0, 2, 1.0)
    b = insider_intensities(0.3, 0, -2, 1.0)
    assert a.lambda1 == pytest.approx(b.lambda2) and a.lambda2 == pytest.approx(b.lambda1)


@pytest.mark.parametrize("t", [0.0, 0.3, 0.9, 0.999])
def test_conditional_density_averages_to_one(t):
    p = JumpPath((0.1, 0.5), (0.35,), 1.0)
    tot = math.fsum(skellam_pmf(x, 1.0, 1.0) * conditional_density(x, t, p) for x in range(-40, 41))
    assert tot == pytest.approx(1.0, abs=1e-12)
    assert conditional_density(0, 0.0, p) == pytest.approx(1.0)


def test_density_bessel_matches_series():
    p = JumpPath((0.1, 0.5), (0.35,), 1.0)
    t = 0.6
    n_t = state(p, t)[2]
    for x in range(-4, 5):
        got = float(density_bessel(x, np.array([n_t]), t, 1.0)[0])
        assert got == pytest.approx(conditional_density(x, t, p), rel=1e-12)


def test_conditional_density_terminal():
    p = JumpPath((0.1,), (), 1.0)
    assert conditional_density(1, 1.0, p) == pytest.approx(math.exp(-terminal_log_pmf(1, 1.0)))
    assert conditional_density(0, 1.0, p) == 0.0


def test_tilted_path_matches_ensemble():
    params = MarketParams(1.0)
    c = TiltControls(3.0, 0.5, 1)
    ens = simulate_tilted_ensemble(params, c, 300, seed=8)
    for i in range(300):
        tp = simulate_tilted_path(params, c, stream(8, i))
        assert tp.path.n_terminal == ens.n_terminal[i]
        assert tp.log_density == pytest.approx(ens.log_density[i], rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("controls", [TiltControls.constant(0.3), TiltControls(5.0, 0.2, 1)])
def test_tilted_density_reweights_to_reference(controls):
    ens = simulate_tilted_ensemble(MarketParams(1.0), controls, 100_000, seed=2)
    w = np.exp(-ens.log_density)
    assert abs(w.mean() - 1.0) <= 4 * w.std() / math.sqrt(w.size)


def test_tilted_controls_validation():
    with pytest.raises(Exception):
        TiltControls(0.0)
    with pytest.raises(DomainError):
        TiltControls(0.1, 1.0, 2)


def test_first_passage_small_run():
    ens = simulate_passage(50_000, seed=1, max_level=3, horizon=50.0)
    for x in (1, 2):
        st_ = first_passage(ens, x)
        assert st_.estimate.within(math.exp(-x), 4.0, 5e-3)
        r = recursion_residual(ens, x)
        assert abs(r.mean) <= 4 * r.se + 1e-12
    assert first_passage(ens, 0).estimate.mean == 1.0


def test_first_passage_path():
    p = JumpPath((0.2, 0.3), (0.25,), 1.0)
    assert first_passage_path(p, 1) == (True, 0.2)
    assert first_passage_path(p, 2) == (False, math.inf)
    assert first_passage_path(p, 0) == (True, 0.0)
