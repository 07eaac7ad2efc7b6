"""numba path kernels for the two-Poisson market.

All kernels consume one stream per path, started from ``(seed, first + i)``.
The untilted draw order per event is: exponential gap at the total rate, then
a uniform mark (N1 with probability r1 / (r1 + r2)).
"""
import math

import numba as nb
import numpy as np

from ..kernels.streams import _nb_exponential, _nb_start, _nb_uniform

E = math.e


@nb.njit(cache=True, nogil=True)
def sim_counts(seed, first, lo, hi, horizon, r1, r2, counts):
    rate = r1 + r2
    for i in range(lo, hi):
        s = _nb_start(seed, first + i)
        c = 0
        if rate > 0.0:
            t = 0.0
            while True:
                s, g = _nb_exponential(s, rate)
                t += g
                if t > horizon:
                    break
                s, u = _nb_uniform(s)
                c += 1
        counts[i] = c


@nb.njit(cache=True, nogil=True)
def sim_fill(seed, first, lo, hi, horizon, r1, r2, offsets, times, marks):
    rate = r1 + r2
    for i in range(lo, hi):
        s = _nb_start(seed, first + i)
        k = offsets[i]
        if rate > 0.0:
            t = 0.0
            while True:
                s, g = _nb_exponential(s, rate)
                t += g
                if t > horizon:
                    break
                s, u = _nb_uniform(s)
                times[k] = t
                marks[k] = 1 if u * rate < r1 else -1
                k += 1


@nb.njit(cache=True, nogil=True)
def first_passage_kernel(seed, first, lo, hi, horizon, r1, r2, max_level, running_max, hit_times, n_end):
    """Running maximum of N1 - N2 on [0, horizon], stopping once ``max_level`` is reached."""
    rate = r1 + r2
    for i in range(lo, hi):
        s = _nb_start(seed, first + i)
        n = 0
        mx = 0
        hit_times[i, 0] = 0.0
        t = 0.0
        if rate > 0.0 and max_level > 0:
            while True:
                s, g = _nb_exponential(s, rate)
                t += g
                if t > horizon:
                    break
                s, u = _nb_uniform(s)
                if u * rate < r1:
                    n += 1
                else:
                    n -= 1
                if n > mx:
                    mx = n
                    hit_times[i, mx] = t
                    if mx >= max_level:
                        break
        running_max[i] = mx
        n_end[i] = n


@nb.njit(cache=True, nogil=True)
def tilted_kernel(seed, first, lo, hi, horizon, high, low, level, has_level,
                  out_n1, out_n2, out_hit, out_logz, out_tau1, out_tau2):
    """Simulation with N1 rate a(t) and N2 rate e * a(t).

    ``a`` equals ``high`` until N1 - N2 first equals ``level`` and ``low``
    afterwards (constant ``high`` when ``has_level`` is false).  Since ``a``
    only changes at event times, the superposed process is drawn at the exact
    rate ``(1 + e) a`` and restarted after a switch.  ``out_logz`` receives
    log dPbar/dP on F_T.
    """
    for i in range(lo, hi):
        s = _nb_start(seed, first + i)
        n1 = 0
        n2 = 0
        hit = has_level and level == 0
        tau = 0.0 if hit else math.inf
        a = low if hit else high
        t = 0.0
        logz = 0.0
        last = 0.0
        tau1 = math.inf
        tau2 = math.inf
        while True:
            lam = (1.0 + E) * a
            s, g = _nb_exponential(s, lam)
            t += g
            if t > horizon:
                break
            s, u = _nb_uniform(s)
            v = u * lam
            if v < a:
                logz += math.log(a) - ((1.0 + E) * a - 2.0) * (t - last)
                last = t
                n1 += 1
                if tau1 == math.inf:
                    tau1 = t
            else:
                logz += 1.0 + math.log(a) - ((1.0 + E) * a - 2.0) * (t - last)
                last = t
                n2 += 1
                if tau2 == math.inf:
                    tau2 = t
            if has_level and not hit and n1 - n2 == level:
                hit = True
                tau = t
                a = low
        logz -= ((1.0 + E) * a - 2.0) * (horizon - last)
        out_n1[i] = n1
        out_n2[i] = n2
        out_hit[i] = tau
        out_logz[i] = logz
        out_tau1[i] = tau1
        out_tau2[i] = tau2
