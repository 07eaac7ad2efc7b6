import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special, stats

from insider_arb.errors import ConvergenceError, DomainError
from insider_arb.kernels import (SkellamParams, adaptive_integral, bessel_i, bessel_ratio, exact_sum,
                                 ks_statistic, log_bessel_i, log_skellam_pmf, mean_se, proportion,
                                 ratio_exp_cdf, ratio_exp_pdf, ratio_exp_sample, skellam_entropy,
                                 skellam_pmf, skellam_support, stream)
from insider_arb.kernels.parallel import chunk_bounds, run_chunked
from insider_arb.kernels.streams import _nb_exponential, _nb_start, _nb_uniform, stream_start

H_SKELLAM_11 = 1.7611813286567677  # direct pmf summation over [-80, 80]


def series_i(n, x, terms=40):
    return math.fsum((x / 2) ** (2 * k + n) / (math.factorial(k) * math.factorial(k + n)) for k in range(terms))


def double_sum_pmf(k, mu1, mu2, terms=60):
    a = abs(k)
    tot = math.fsum(mu1 ** (j + max(k, 0)) / math.factorial(j + max(k, 0))
                    * mu2 ** (j + max(-k, 0)) / math.factorial(j + max(-k, 0)) for j in range(terms))
    return math.exp(-mu1 - mu2) * tot if a >= 0 else 0.0


# -- Bessel

def test_bessel_examples():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(1, 0.0) == 0.0
    assert bessel_i(0, 2.0) == pytest.approx(series_i(0, 2.0), abs=1e-12)
    assert bessel_i(0, 2.0) == pytest.approx(2.2795853, abs=1e-6)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 17, 40])
@pytest.mark.parametrize("x", [1e-8, 0.1, 1.0, 7.5, 14.9, 15.1, 30.0, 99.0])
def test_bessel_matches_scipy(n, x):
    if special.ive(n, x) > 0:
        ref = math.log(special.ive(n, x)) + x
    else:
        # scipy underflows; the leading series term is exact to x^2 relative
        ref = n * math.log(x / 2) - math.lgamma(n + 1)
    assert log_bessel_i(n, x) == pytest.approx(ref, rel=1e-12, abs=1e-12)
    if x <= 100 and special.iv(n, x) > 1e-300:
        assert bessel_i(n, x) == pytest.approx(special.iv(n, x), rel=1e-12)


def test_bessel_symmetry_and_large_argument():
    assert bessel_i(-3, 2.5) == bessel_i(3, 2.5)
    v = log_bessel_i(5, 1e4)
    assert math.isfinite(v)
    assert v == pytest.approx(math.log(special.ive(5, 1e4)) + 1e4, rel=1e-12)


@pytest.mark.parametrize("x", [-1.0, math.nan, math.inf])
def test_bessel_domain(x):
    with pytest.raises(DomainError):
        log_bessel_i(0, x)


def test_bessel_recurrence_grid():
    for x in np.linspace(0.1, 50.0, 60):
        for n in range(1, 31):
            lhs = bessel_i(n - 1, x) - bessel_i(n + 1, x)
            rhs = 2 * n / x * bessel_i(n, x)
            if rhs > 1e-290:
                assert lhs == pytest.approx(rhs, rel=1e-9)


@given(st.integers(1, 60), st.floats(1e-6, 500.0))
def test_bessel_ratio_property(n, x):
    ref = special.ive(n - 1, x) / special.ive(n, x) if special.ive(n, x) > 1e-290 else None
    r = bessel_ratio(n - 1, n, x)
    assert r > 1.0
    if ref is not None and math.isfinite(ref):
        assert r == pytest.approx(ref, rel=1e-11)


# -- Skellam

def test_skellam_examples():
    assert skellam_pmf(0, 1.0, 1.0) == pytest.approx(double_sum_pmf(0, 1, 1), abs=1e-15)
    assert skellam_pmf(0, 1.0, 1.0) == pytest.approx(0.308508, abs=1e-6)
    assert skellam_pmf(1, 1.0, 1.0) == pytest.approx(0.215269, abs=1e-6)
    assert skellam_pmf(1, SkellamParams(1.0, 1.0)) == skellam_pmf(1, 1.0, 1.0)


@given(st.integers(-25, 25), st.floats(0.01, 8.0), st.floats(0.01, 8.0))
def test_skellam_matches_double_sum_and_scipy(k, mu1, mu2):
    ref = stats.skellam.pmf(k, mu1, mu2)
    got = skellam_pmf(k, mu1, mu2)
    assert got == pytest.approx(double_sum_pmf(k, mu1, mu2, 120), rel=1e-10, abs=1e-300)
    assert got == pytest.approx(ref, rel=1e-8, abs=1e-15)
    assert math.exp(log_skellam_pmf(k, mu1, mu2)) == pytest.approx(got, rel=1e-13)


@given(st.integers(0, 30), st.floats(0.0, 6.0))
def test_skellam_symmetric_for_equal_means(k, mu):
    assert skellam_pmf(k, mu, mu) == pytest.approx(skellam_pmf(-k, mu, mu), rel=1e-14)


@pytest.mark.parametrize("mu1,mu2", [(0.1, 0.2), (1.0, 1.0), (3.0, 0.5), (5.0, 5.0)])
def test_skellam_sums_to_one(mu1, mu2):
    lo, hi = skellam_support(SkellamParams(mu1, mu2))
    assert abs(exact_sum(skellam_pmf(k, mu1, mu2) for k in range(lo, hi + 1)) - 1.0) < 1e-10


def test_skellam_degenerate_and_invalid():
    assert skellam_pmf(0, 0.0, 0.0) == 1.0
    assert skellam_pmf(1, 0.0, 0.0) == 0.0
    assert skellam_pmf(2, 1.5, 0.0) == pytest.approx(stats.poisson.pmf(2, 1.5), rel=1e-13)
    for bad in (math.nan, math.inf, -1.0):
        with pytest.raises(DomainError):
            skellam_pmf(0, bad, 1.0)


def test_skellam_entropy():
    assert skellam_entropy(0.0, 0.0) == 0.0
    a = skellam_entropy(1.0, 1.0, window=(-40, 40))
    b = skellam_entropy(1.0, 1.0, window=(-80, 80))
    assert abs(a - b) < 1e-10
    direct = -math.fsum(p * math.log(p) for p in (skellam_pmf(k, 1.0, 1.0) for k in range(-80, 81)) if p > 0)
    assert b == pytest.approx(direct, abs=1e-13)
    assert skellam_entropy(1.0, 1.0) == pytest.approx(H_SKELLAM_11, abs=1e-12)
    value, bound = skellam_entropy(1.0, 1.0, return_bound=True)
    assert 0.0 <= bound < 1e-10


# -- ratio law

def test_ratio_exp_examples():
    assert ratio_exp_cdf(1.0) == 0.5
    assert ratio_exp_cdf(1 / math.e) == pytest.approx(1 / (1 + math.e), abs=1e-12)
    assert ratio_exp_pdf(1.0) == 0.25
    for z in (0.0, -1.0):
        with pytest.raises(DomainError):
            ratio_exp_cdf(z)


def test_ratio_exp_sampler_ks_and_quantiles():
    n = 100_000
    xs = np.array([ratio_exp_sample(2.0, 3.0, stream(5, i)) for i in range(n)])
    ks = ks_statistic(xs, np.vectorize(ratio_exp_cdf))
    assert ks < 1.36 / math.sqrt(n)
    for q in (0.25, 0.5, 0.75):
        z = q / (1 - q)
        p = np.mean(xs <= z)
        assert abs(p - q) <= 3 * math.sqrt(q * (1 - q) / n)
    with pytest.raises(DomainError):
        ratio_exp_sample(0.0, 1.0, stream(1))


# -- quadrature

def test_adaptive_integral_examples():
    assert adaptive_integral(lambda t: 1.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert adaptive_integral(lambda t: t, 0.0, 1.0) == pytest.approx(0.5, abs=1e-12)
    v = adaptive_integral(lambda t: -math.log1p(-t) if t < 1 else 0.0, 0.0, 1.0, singular_endpoint="b")
    assert v == pytest.approx(1.0, abs=1e-8)


def test_adaptive_integral_budget():
    with pytest.raises(ConvergenceError) as info:
        adaptive_integral(lambda t: math.sin(1.0 / t) / t if t > 0 else 0.0, 0.0, 1.0, abs_tol=1e-14, limit=5)
    assert math.isfinite(info.value.best_estimate)


# -- streams

def test_stream_determinism_and_order_independence():
    a = [stream(9, i).poisson_jump_times(2.0, 3.0) for i in range(50)]
    b = [stream(9, i).poisson_jump_times(2.0, 3.0) for i in reversed(range(50))][::-1]
    assert a == b
    assert stream(9, 0).poisson_jump_times(0.0, 1.0) == []
    for ts in a:
        assert all(0 < s < t <= 3.0 for s, t in zip(ts, ts[1:]))


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**40))
def test_numba_twin_matches_python(seed, index):
    s = stream(seed, index)
    # jitted functions return uint64 state as a Python int; re-wrap between calls
    state = np.uint64(_nb_start(np.uint64(seed), np.uint64(index)))
    assert int(state) == stream_start(seed, index)
    for _ in range(5):
        state, u = _nb_uniform(state)
        state = np.uint64(state % 2**64)
        assert u == s.uniform()
    state, e = _nb_exponential(state, 1.7)
    assert e == s.exponential(1.7)


def test_stream_poisson_mean():
    n = 100_000
    counts = np.array([len(stream(2, i).poisson_jump_times(1.0, 1.0)) for i in range(n)])
    assert abs(counts.mean() - 1.0) <= 3 * math.sqrt(1 / n)


def test_uniform_open_interval():
    s = stream(0, 0)
    u = [s.uniform() for _ in range(10_000)]
    assert 0.0 < min(u) and max(u) < 1.0


# -- statistics and chunking

def test_mean_se_and_proportion():
    e = mean_se([1.0, 2.0, 3.0, 4.0])
    assert e.mean == 2.5 and e.n == 4
    assert e.se == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    p = proportion([True, False, False, True])
    assert p.mean == 0.5


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
def test_exact_sum_is_order_free(xs):
    assert exact_sum(xs) == exact_sum(reversed(xs)) == math.fsum(xs)


@given(st.integers(0, 5000), st.integers(1, 64))
def test_chunk_bounds_cover(n, threads):
    bounds = chunk_bounds(n, threads)
    covered = [i for lo, hi in bounds for i in range(lo, hi)]
    assert covered == list(range(n))


def test_run_chunked_thread_invariance():
    outs = []
    for threads in (1, 4, 16):
        out = np.zeros(1000)

        def kernel(lo, hi, out=out):
            for i in range(lo, hi):
                out[i] = stream(4, i).uniform()

        run_chunked(kernel, 1000, threads)
        outs.append(out)
    assert np.array_equal(outs[0], outs[1]) and np.array_equal(outs[0], outs[2])
