import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from insider_arb.errors import DomainError
from insider_arb.insider_utility import (ConstantIntensities, DegenerateInputError, EpsilonStopping,
                                         bucket_partition_residual, compensator_check, concavity_certificate,
                                         dual_integral_estimate, dual_rate, entropy_identity_check,
                                         fraction_on_boundary, insider_log_utility_report, optimal_fraction,
                                         path_functionals, power_dual_inf, power_dual_value, simulate_log_wealth)
from insider_arb.kernels import skellam_pmf
from insider_arb.poisson_market import (JumpPath, MarketParams, TiltControls, insider_intensities,
                                        simulate_ensemble)

E = math.e
PI_LOW, PI_HIGH = -1 / (E - 1), 1 / (1 - 1 / E)
POWER_DUAL_PIN = 0.3167678229932722  # gamma 0.01, constant alpha1 = 1, bucket 0, 2e4 paths, seed 4


def growth(pi, l1, l2):
    return l1 * math.log1p((E - 1) * pi) + l2 * math.log1p((1 / E - 1) * pi)


def test_optimal_fraction_examples():
    assert optimal_fraction(2.0, 2.0) == 0.5
    assert (E - 1) * (1 - 1 / E) == pytest.approx(E + 1 / E - 2, rel=1e-15)
    l1 = 1.0
    l2 = l1 * (E - 1) / (1 - 1 / E)
    assert abs(optimal_fraction(l1, l2)) < 1e-15
    assert optimal_fraction(3.0, 0.0) == pytest.approx(PI_HIGH)
    assert fraction_on_boundary(3.0, 0.0) and not fraction_on_boundary(1.0, 1.0)
    with pytest.raises(DegenerateInputError):
        optimal_fraction(0.0, 0.0)
    with pytest.raises(DomainError):
        optimal_fraction(-1.0, 1.0)


@given(st.floats(1e-6, 1e3), st.floats(1e-6, 1e3))
def test_optimal_fraction_maximises_growth(l1, l2):
    pi = optimal_fraction(l1, l2)
    assert PI_LOW < pi < PI_HIGH
    scale = l1 + l2
    for d in (1e-3, -1e-3):
        q = pi + d * (PI_HIGH - PI_LOW)
        if PI_LOW < q < PI_HIGH:
            assert growth(q, l1, l2) <= growth(pi, l1, l2) + 1e-12 * scale


def test_log_wealth_hand_paths():
    assert simulate_log_wealth(JumpPath((), (), 1.0)).log_wealth == 0.0
    w = simulate_log_wealth(JumpPath((0.4,), (), 1.0), EpsilonStopping.never())
    pair = insider_intensities(0.4, 0, 1, 1.0)
    pi = optimal_fraction(pair.lambda1, pair.lambda2)
    assert w.factors[0] == pytest.approx(1 + (E - 1) * pi, rel=1e-12)
    assert w.factors[0] > 1 and w.log_wealth > 0


def test_log_wealth_kernel_matches_python(small_ensemble):
    eps = (0.0, 1e-2, 1e-3, 0.2)
    f = path_functionals(small_ensemble, epsilons=eps)
    for i in range(300):
        p = small_ensemble.path(i)
        for k, e in enumerate(eps):
            w = simulate_log_wealth(p, EpsilonStopping(e))
            assert w.log_wealth == pytest.approx(f.log_wealth[i, k], rel=1e-10, abs=1e-12)


def test_epsilon_traded_sets_nested(small_ensemble):
    for i in range(100):
        p = small_ensemble.path(i)
        sets = [set(simulate_log_wealth(p, EpsilonStopping(e)).jump_times) for e in (0.2, 1e-2, 1e-3, 1e-4)]
        assert all(a <= b for a, b in zip(sets, sets[1:]))


def test_epsilon_validation():
    with pytest.raises(DomainError):
        EpsilonStopping(1.0)
    assert EpsilonStopping.never().inside(1e300)


def test_path_functionals_thread_invariance(small_ensemble):
    a = path_functionals(small_ensemble, threads=1)
    b = path_functionals(small_ensemble, threads=16)
    for name in ("entropy", "dual", "log_z", "log_wealth"):
        assert np.array_equal(getattr(a, name), getattr(b, name))


def test_dual_integral_small_horizon_and_buckets(small_ensemble):
    tiny = simulate_ensemble(MarketParams(1e-6), 500, seed=4)
    assert abs(dual_integral_estimate(tiny).mean) < 1e-5
    f = path_functionals(small_ensemble, epsilons=(0.0,))
    assert bucket_partition_residual(f, range(-3, 4)) <= 1e-12


def test_entropy_identity_small(small_ensemble):
    ident = entropy_identity_check(small_ensemble, buckets=(0, 1, 40))
    assert 40 in ident.skipped
    row0 = next(r for r in ident.rows if r.x == 0)
    assert row0.target == pytest.approx(-math.log(skellam_pmf(0, 1.0, 1.0)))
    assert row0.target == pytest.approx(1.176006458517, abs=1e-11)
    assert ident.aggregate.within(ident.entropy, 4.0)


def test_log_utility_report_small(small_ensemble):
    r = insider_log_utility_report(small_ensemble, sweep=(1e-2,), coarse=0.2)
    assert r.admissible and r.value > 0
    assert abs(r.row(1e-3).gap) <= 4 * r.row(1e-3).se_gap
    names = [c.name for c in r.checks()]
    assert "zero_strategy_below_value" in names


def test_power_dual_pin_and_infeasible():
    ens = simulate_ensemble(MarketParams(1.0), 20_000, seed=4)
    r = power_dual_value(0.01, TiltControls.constant(1.0), 0, ens)
    assert r.value == pytest.approx(POWER_DUAL_PIN, rel=1e-12)
    bad = power_dual_value(0.5, ConstantIntensities(1.0, 1.0), 0, ens)
    assert not bad.feasible and math.isnan(bad.value)
    cands = [TiltControls.constant(a) for a in (0.2, 0.5, 1.0)] + [ConstantIntensities(1.0, 1.0)]
    best, results = power_dual_inf(0.5, cands, 0, ens)
    assert best.value == min(r.value for r in results if r.feasible)
    with pytest.raises(DomainError):
        power_dual_value(1.0, TiltControls.constant(1.0), 0, ens)


@given(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0, 10), st.floats(0, 10))
def test_dual_rate_concave(a, b, l1, l2):
    bad, _ = concavity_certificate([(a, b, l1, l2)])
    assert bad == 0
    star = (l1 + l2) / (1 + E)
    if star > 0:
        assert dual_rate(star, l1, l2) >= dual_rate(a, l1, l2) - 1e-9


def test_compensated_increments_centred(small_ensemble):
    for r in compensator_check(small_ensemble, 0.25, 0.9, buckets=(0,)):
        assert abs(r.increment.mean) <= 4 * r.increment.se
