"""Per-path integrals and wealth along insider intensity curves.

Between consecutive jumps the remaining signal ``y = N_T - N_t`` is constant
and the intensities are smooth functions of ``tau = T - t``.  All segments are
integrated in ``u = log(tau)``: the ``y != 0`` intensities grow like
``|y| / tau`` towards a jump close to ``T``, and on the final segment
(``y = 0``) the ``tau log tau`` terms become smooth in ``u``.
Quadrature is adaptive Gauss-Kronrod (7/15 points) with a local error test.
"""
import math

import numba as nb
import numpy as np

from ..poisson_market.density import intensities_nb

E = math.e
LOG_E1 = math.log(E + 1.0)

_XK = np.array([0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                0.207784955007898467600689403773245, 0.0])
_WK = np.array([0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

MAX_STACK = 256
TAU_FLOOR = 1e-14


@nb.njit(cache=True, nogil=True)
def _xlogx(v):
    return v * math.log(v) if v > 0.0 else 0.0


@nb.njit(cache=True, nogil=True)
def _integrand(mode, y, tau, out):
    l1, l2 = intensities_nb(y, tau)
    if mode == 0:
        s = l1 + l2
        out[0] = _xlogx(l1) + _xlogx(l2) - l1 - l2 + 2.0
        out[1] = (s * (math.log(s) - LOG_E1) if s > 0.0 else 0.0) - l1 + 2.0
        out[2] = s - 2.0
    else:
        out[0] = l1
        out[1] = l2
        out[2] = 0.0


@nb.njit(cache=True, nogil=True)
def _gk_piece(mode, y, a, b, res, err, tmp, gauss):
    """One Gauss-Kronrod 7/15 panel on [a, b] in the variable u = log(tau)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    for j in range(3):
        res[j] = 0.0
        gauss[j] = 0.0
    for k in range(15):
        if k < 7:
            x = c - h * _XK[k]
            wk = _WK[k]
            wg = _WG[k // 2] if k % 2 == 1 else 0.0
        elif k == 7:
            x = c
            wk = _WK[7]
            wg = _WG[3]
        else:
            x = c + h * _XK[14 - k]
            wk = _WK[14 - k]
            wg = _WG[(14 - k) // 2] if (14 - k) % 2 == 1 else 0.0
        tau = math.exp(x)
        _integrand(mode, y, tau, tmp)
        for j in range(3):
            res[j] += wk * tmp[j] * tau
            gauss[j] += wg * tmp[j] * tau
    for j in range(3):
        res[j] *= h
        err[j] = abs(res[j] - gauss[j] * h)


@nb.njit(cache=True, nogil=True)
def make_work():
    return np.empty(MAX_STACK), np.empty(MAX_STACK), np.zeros((4, 3))


@nb.njit(cache=True, nogil=True)
def integrate_segment(mode, y, tau_lo, tau_hi, tol, out, stack_a, stack_b, scratch):
    """Integrals over ``tau in [tau_lo, tau_hi]`` of the three mode integrands.

    Panels live in ``u = log(tau)``.  A segment reaching ``tau = 0`` is cut at
    ``TAU_FLOOR`` and the sliver below is filled with the small-argument
    integrand value.  Returns False when some panel missed its local error
    target within the subdivision budget; ``out`` then holds the best estimate.
    """
    for j in range(3):
        out[j] = 0.0
    if tau_hi <= tau_lo:
        return True
    res = scratch[0]
    err = scratch[1]
    tmp = scratch[2]
    gauss = scratch[3]
    if tau_lo < TAU_FLOOR:
        lo = min(TAU_FLOOR, tau_hi)
        _integrand(mode, y, 0.5 * lo, tmp)
        for j in range(3):
            out[j] += tmp[j] * (lo - tau_lo)
        tau_lo = lo
        if tau_hi <= tau_lo:
            return True
    a0 = math.log(tau_lo)
    b0 = math.log(tau_hi)
    total = b0 - a0
    stack_a[0] = a0
    stack_b[0] = b0
    top = 1
    ok = True
    while top > 0:
        top -= 1
        a = stack_a[top]
        b = stack_b[top]
        _gk_piece(mode, y, a, b, res, err, tmp, gauss)
        e = max(err[0], max(err[1], err[2]))
        local = tol * (b - a) / total
        if e <= local or (b - a) < 1e-12 * total or top >= MAX_STACK - 2:
            if e > local:
                ok = False
            for j in range(3):
                out[j] += res[j]
        else:
            m = 0.5 * (a + b)
            stack_a[top] = m
            stack_b[top] = b
            stack_a[top + 1] = a
            stack_b[top + 1] = m
            top += 2
    return ok


@nb.njit(cache=True, nogil=True)
def _inside(v, eps):
    return eps < v < 1.0 / eps


@nb.njit(cache=True, nogil=True)
def path_functionals(offsets, times, marks, horizon, eps, tol, lo, hi,
                     out_a, out_d, out_s, out_jumplog, out_logz, out_logv, out_minfactor, out_ok):
    """Per-path integrals and wealth.

    out_a: int_0^T (l1 log l1 + l2 log l2 - l1 - l2 + 2) dt
    out_d: int_0^T (s log(s / (e+1)) - l1 + 2) dt, s = l1 + l2
    out_s: int_0^T (l1 + l2 - 2) dt
    out_jumplog: sum over N1 jumps of log l1(t-) plus over N2 jumps of log l2(t-)
    out_logz: log Z_T for the dual density alpha1 = s / (e + 1), alpha2 = e alpha1
    out_logv[:, k]: log-wealth of the optimal fraction stopped at tau_eps[k]
                    (eps[k] = 0 means no stopping)
    """
    buf = np.zeros(3)
    stack_a, stack_b, scratch = make_work()
    neps = eps.shape[0]
    active = np.empty(neps, dtype=np.bool_)
    c1 = E - 1.0
    c2 = 1.0 / E - 1.0
    denom = (E - 1.0) * (1.0 - 1.0 / E)
    for i in range(lo, hi):
        k0 = offsets[i]
        k1 = offsets[i + 1]
        n_term = 0
        for k in range(k0, k1):
            n_term += marks[k]
        a_int = 0.0
        d_int = 0.0
        s_int = 0.0
        jumplog = 0.0
        logz = 0.0
        minfactor = math.inf
        ok = True
        for j in range(neps):
            active[j] = True
            out_logv[i, j] = 0.0
        n_t = 0
        t_prev = 0.0
        for k in range(k0, k1 + 1):
            t_next = times[k] if k < k1 else horizon
            y = n_term - n_t
            tau_hi = horizon - t_prev
            tau_lo = horizon - t_next
            ok = integrate_segment(0, y, tau_lo, tau_hi, tol, buf, stack_a, stack_b, scratch) and ok
            a_int += buf[0]
            d_int += buf[1]
            s_int += buf[2]
            if k == k1:
                break
            # left limits at the jump and values at the segment start
            l1s, l2s = intensities_nb(y, tau_hi)
            l1, l2 = intensities_nb(y, tau_lo)
            s = l1 + l2
            pi = (l1 * c1 + l2 * c2) / (denom * s)
            if marks[k] > 0:
                jumplog += math.log(l1)
                logz += math.log(s) - LOG_E1
                factor = 1.0 + c1 * pi
            else:
                jumplog += math.log(l2)
                logz += 1.0 + math.log(s) - LOG_E1
                factor = 1.0 + c2 * pi
            if factor < minfactor:
                minfactor = factor
            for j in range(neps):
                if active[j] and eps[j] > 0.0:
                    if not (_inside(l1s, eps[j]) and _inside(l2s, eps[j])
                            and _inside(l1, eps[j]) and _inside(l2, eps[j])):
                        active[j] = False
                if active[j]:
                    out_logv[i, j] += math.log(factor) if factor > 0.0 else -math.inf
            n_t += marks[k]
            t_prev = t_next
        out_a[i] = a_int
        out_d[i] = d_int
        out_s[i] = s_int
        out_jumplog[i] = jumplog
        out_logz[i] = logz - s_int
        out_minfactor[i] = minfactor
        out_ok[i] = ok


@nb.njit(cache=True, nogil=True)
def intensity_integrals(offsets, times, marks, horizon, t1, t2, tol, lo, hi, out_l1, out_l2, out_dn1, out_dn2, out_ok):
    """``int_{t1}^{t2} lambda^i dt`` and the jump counts of N1, N2 in (t1, t2]."""
    buf = np.zeros(3)
    stack_a, stack_b, scratch = make_work()
    for i in range(lo, hi):
        k0 = offsets[i]
        k1 = offsets[i + 1]
        n_term = 0
        for k in range(k0, k1):
            n_term += marks[k]
        n_t = 0
        t_prev = 0.0
        acc1 = 0.0
        acc2 = 0.0
        dn1 = 0
        dn2 = 0
        ok = True
        for k in range(k0, k1 + 1):
            t_next = times[k] if k < k1 else horizon
            a = max(t_prev, t1)
            b = min(t_next, t2)
            if b > a:
                ok = integrate_segment(1, n_term - n_t, horizon - b, horizon - a, tol, buf, stack_a, stack_b, scratch) and ok
                acc1 += buf[0]
                acc2 += buf[1]
            if k == k1:
                break
            if t1 < t_next <= t2:
                if marks[k] > 0:
                    dn1 += 1
                else:
                    dn2 += 1
            n_t += marks[k]
            t_prev = t_next
        out_l1[i] = acc1
        out_l2[i] = acc2
        out_dn1[i] = dn1
        out_dn2[i] = dn2
        out_ok[i] = ok


@nb.njit(cache=True, nogil=True)
def control_log_density(offsets, marks, times, horizon, high, low, level, has_level, lo, hi, out):
    """``log Z_T`` w.r.t. unit intensities for alpha1 = high (low after N hits ``level``), alpha2 = e alpha1."""
    for i in range(lo, hi):
        a = high
        hit = has_level and level == 0
        if hit:
            a = low
        n = 0
        last = 0.0
        logz = 0.0
        for k in range(offsets[i], offsets[i + 1]):
            t = times[k]
            logz -= ((1.0 + E) * a - 2.0) * (t - last)
            if marks[k] > 0:
                logz += math.log(a)
            else:
                logz += 1.0 + math.log(a)
            last = t
            n += marks[k]
            if has_level and not hit and n == level:
                hit = True
                a = low
        logz -= ((1.0 + E) * a - 2.0) * (horizon - last)
        out[i] = logz
