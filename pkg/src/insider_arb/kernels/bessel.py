"""Modified Bessel functions of the first kind for integer order.

Small arguments (x < 15) use the power series, summed relative to its leading
term so that ``log I_n`` is available without under- or overflow.  Larger
arguments use Miller's backward recurrence normalised by
``I_0(x) + 2 * sum_k I_k(x) = exp(x)``, again carried in log form.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

from ..errors import DomainError

SERIES_CUTOFF = 15.0
SERIES_RTOL = 1e-17
# below this argument the leading series term replaces the full ratio
SMALL_ARG = 1e-8
_RESCALE = 1e250


@nb.njit(cache=True, nogil=True)
def _log_series(n, x):
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + n))
        total += term
        if term < SERIES_RTOL * total:
            break
    return n * math.log(0.5 * x) - math.lgamma(n + 1.0) + math.log(total)


@nb.njit(cache=True, nogil=True)
def _log_miller(n, x):
    top = n + int(9.0 * math.sqrt(x)) + 30
    inv = 2.0 / x
    ip1 = 0.0
    i = 1e-300
    norm = 0.0
    saved = 0.0
    for k in range(top, 0, -1):
        im1 = ip1 + k * inv * i
        ip1 = i
        i = im1
        # i now holds the (unnormalised) value of order k - 1
        if k - 1 == n:
            saved = i
        if k - 1 > 0:
            norm += 2.0 * i
        else:
            norm += i
        if i > _RESCALE:
            i /= _RESCALE
            ip1 /= _RESCALE
            norm /= _RESCALE
            if k - 1 <= n:
                saved /= _RESCALE
    return x + math.log(saved) - math.log(norm)


@nb.njit(cache=True, nogil=True)
def log_bessel_i_nb(n, x):
    """``log I_n(x)`` for integer ``n`` and ``x >= 0`` (no validation)."""
    if n < 0:
        n = -n
    if x == 0.0:
        return 0.0 if n == 0 else -np.inf
    if x < SERIES_CUTOFF:
        return _log_series(n, x)
    return _log_miller(n, x)


@nb.njit(cache=True, nogil=True)
def log_bessel_ratio_nb(a, b, x):
    """``log(I_a(x) / I_b(x))``; for tiny ``x`` the leading series terms are used."""
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    if x < SMALL_ARG:
        return (a - b) * math.log(0.5 * x) - math.lgamma(a + 1.0) + math.lgamma(b + 1.0)
    return log_bessel_i_nb(a, x) - log_bessel_i_nb(b, x)


@nb.njit(cache=True, nogil=True)
def bessel_ratio_up_nb(m, x):
    """``I_{m+1}(x) / I_m(x)`` for ``m >= 0`` by backward continued-fraction recurrence.

    Uses ``r_k = 1 / (2 (k + 1) / x + r_{k+1})`` started far enough above
    ``max(m, 2x)`` that the truncation error is below double precision.
    """
    if x < SMALL_ARG:
        return 0.5 * x / (m + 1.0)
    top = m + int(2.0 * x) + 48
    r = 0.0
    for k in range(top, m - 1, -1):
        r = 1.0 / (2.0 * (k + 1) / x + r)
    return r


def _check(order, x: float) -> tuple[int, float]:
    if int(order) != order:
        raise DomainError("Bessel order must be an integer")
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"Bessel argument must be finite and nonnegative, got {x}")
    return abs(int(order)), x


def log_bessel_i(order: int, x: float) -> float:
    """Natural log of ``I_order(x)``; ``-inf`` when ``I`` vanishes (x = 0, order != 0)."""
    n, x = _check(order, x)
    return float(log_bessel_i_nb(n, x))


def bessel_i(order: int, x: float) -> float:
    """Modified Bessel function of the first kind, ``I_{-n} = I_n``."""
    return math.exp(log_bessel_i(order, x))


def bessel_ratio(a: int, b: int, x: float) -> float:
    """``I_a(x) / I_b(x)`` evaluated from log values."""
    a, x = _check(a, x)
    b, _ = _check(b, x)
    if x == 0.0:
        if a == b:
            return 1.0
        if a > b:
            return 0.0
        raise DomainError("ratio diverges at x = 0")
    return math.exp(log_bessel_ratio_nb(a, b, x))
