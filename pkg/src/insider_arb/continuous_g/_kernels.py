"""Gaussian cell probabilities and the Brownian insider kernel."""
import math

import numba as nb
import numpy as np

from ..kernels.streams import _nb_normal_pair, _nb_start

SQRT2 = math.sqrt(2.0)
SQRT_PI = math.sqrt(math.pi)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@nb.njit(cache=True, nogil=True)
def erfcx(x):
    """``exp(x^2) erfc(x)`` for ``x >= 0``; asymptotic series beyond 26."""
    if x < 26.0:
        return math.exp(x * x) * math.erfc(x)
    y = 1.0 / (2.0 * x * x)
    return (1.0 - y * (1.0 - 3.0 * y * (1.0 - 5.0 * y))) / (x * SQRT_PI)


@nb.njit(cache=True, nogil=True)
def upper_tail(x):
    """``1 - Phi(x)``."""
    return 0.5 * math.erfc(x / SQRT2)


@nb.njit(cache=True, nogil=True)
def interval_prob(lo, hi):
    """``Phi(hi) - Phi(lo)`` without cancellation in either tail."""
    if lo >= 0.0:
        return upper_tail(lo) - upper_tail(hi)
    if hi <= 0.0:
        return upper_tail(-hi) - upper_tail(-lo)
    return 1.0 - upper_tail(-lo) - upper_tail(hi)


@nb.njit(cache=True, nogil=True)
def log_gradient(lo, hi):
    """``(phi(lo) - phi(hi)) / (Phi(hi) - Phi(lo))`` for standardised bounds ``lo < hi``.

    Far in a tail both numerator and denominator underflow; there the ratio
    is rewritten with scaled complementary error functions.
    """
    if lo > 5.0:
        # phi(lo) (1 - e^{(lo^2 - hi^2)/2}) / (Q(lo) - Q(hi)), Q(x) = phi(x) erfcx(x/sqrt2) sqrt(pi/2)
        r = math.exp(0.5 * (lo * lo - hi * hi)) if hi < math.inf else 0.0
        qlo = erfcx(lo / SQRT2)
        qhi = erfcx(hi / SQRT2) * r if hi < math.inf else 0.0
        return (1.0 - r) / ((qlo - qhi) * math.sqrt(0.5 * math.pi))
    if hi < -5.0:
        return -log_gradient(-hi, -lo)
    plo = INV_SQRT_2PI * math.exp(-0.5 * lo * lo) if lo > -math.inf else 0.0
    phi = INV_SQRT_2PI * math.exp(-0.5 * hi * hi) if hi < math.inf else 0.0
    return (plo - phi) / interval_prob(lo, hi)


@nb.njit(cache=True, nogil=True)
def cell_index(edges, w):
    """Index ``i`` with ``edges[i] < w <= edges[i+1]``; edges include +-inf."""
    lo = 0
    hi = edges.shape[0] - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if w > edges[mid]:
            lo = mid
        else:
            hi = mid
    return lo


@nb.njit(cache=True, nogil=True)
def bs_kernel(seed, first, lo, hi, horizon, grid, n_int, edges, n_cells, check_cell, check_idx,
              out_value, out_coarse, out_density):
    """Brownian insider log-value for several partitions on shared paths.

    ``grid`` holds increasing times from 0 to ``horizon``; W is sampled
    exactly on it.  ``out_value[i, j] = 0.5 * sum_k a_{t_k}^2 (t_{k+1} - t_k)``
    over the first ``n_int`` intervals (left-point rule), with the drift of
    partition ``j`` (row ``j`` of ``edges`` holds ``n_cells[j] + 1`` edges,
    outer ones infinite).  ``out_coarse`` repeats the sum on every other grid
    point (``n_int`` must be even).  ``out_density[i, k]`` is ``p^Gamma`` of
    cell ``check_cell`` of partition 0 at grid index ``check_idx[k]``.
    """
    m = grid.shape[0]
    w = np.empty(m)
    ca = edges[0, check_cell]
    cb = edges[0, check_cell + 1]
    pcheck = interval_prob(ca / math.sqrt(horizon), cb / math.sqrt(horizon))
    for i in range(lo, hi):
        s = _nb_start(seed, first + i)
        w[0] = 0.0
        k = 1
        while k < m:
            s, z1, z2 = _nb_normal_pair(s)
            w[k] = w[k - 1] + math.sqrt(grid[k] - grid[k - 1]) * z1
            if k + 1 < m:
                w[k + 1] = w[k] + math.sqrt(grid[k + 1] - grid[k]) * z2
            k += 2
        wt = w[m - 1]
        for j in range(n_cells.shape[0]):
            e = edges[j, :n_cells[j] + 1]
            c = cell_index(e, wt)
            a = e[c]
            b = e[c + 1]
            acc = 0.0
            coarse = 0.0
            for k in range(n_int):
                t = grid[k]
                sq = math.sqrt(horizon - t)
                drift = log_gradient((a - w[k]) / sq, (b - w[k]) / sq) / sq
                acc += 0.5 * drift * drift * (grid[k + 1] - t)
                if k % 2 == 0:
                    coarse += 0.5 * drift * drift * (grid[k + 2] - t)
            out_value[i, j] = acc
            out_coarse[i, j] = coarse
        for k in range(check_idx.shape[0]):
            t = grid[check_idx[k]]
            sq = math.sqrt(horizon - t)
            out_density[i, k] = interval_prob((ca - w[check_idx[k]]) / sq, (cb - w[check_idx[k]]) / sq) / pcheck
