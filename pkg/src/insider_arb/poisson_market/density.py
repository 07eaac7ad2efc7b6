"""Conditional density of the terminal signal and the insider intensities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb
import numpy as np

from ..errors import DomainError
from ..kernels.bessel import bessel_ratio_up_nb, log_bessel_i_nb
from ..kernels.distributions import log_skellam_pmf
from .paths import JumpPath

SERIES_RTOL = 1e-17


def _log_poisson_pair_series(shift: int, tau: float) -> float:
    """log of ``sum_{k>=0, k+shift>=0} e^{-2 tau} tau^(2k+shift) / (k! (k+shift)!)``.

    Terms are log-concave in ``k``; summation stops once past the peak and the
    next term is below ``SERIES_RTOL`` times the running sum.
    """
    if tau == 0.0:
        return 0.0 if shift == 0 else -math.inf
    log_tau = math.log(tau)
    k = max(0, -shift)
    logs = []
    prev = -math.inf
    while True:
        lt = -2.0 * tau + (2 * k + shift) * log_tau - math.lgamma(k + 1.0) - math.lgamma(k + shift + 1.0)
        logs.append(lt)
        peak = max(logs)
        if lt < prev and lt - peak < math.log(SERIES_RTOL) - math.log(len(logs)):
            break
        prev = lt
        k += 1
    peak = max(logs)
    return peak + math.log(math.fsum(math.exp(v - peak) for v in logs))


def conditional_density(x: int, t: float, path: JumpPath) -> float:
    """``p^x_t = P[N_T = x | F_t] / P[N_T = x]`` along ``path``.

    For ``t < T`` both numerator and denominator are the double Poisson sums
    over the remaining and the full horizon; at ``t = T`` the indicator form
    ``1{N_T = x} / P[N_T = x]`` is returned.  Left limits at ``T`` need an
    explicit ``t = T - 1e-12``.
    """
    T = path.horizon
    if not (0.0 <= t <= T):
        raise DomainError(f"t={t} outside [0, {T}]")
    x = int(x)
    log_den = _log_poisson_pair_series(x, T)
    if t == T:
        return math.exp(-log_den) if path.n_terminal == x else 0.0
    n1, n2 = path.counts(t)
    return math.exp(_log_poisson_pair_series(x - (n1 - n2), T - t) - log_den)


def qi_weight(g: int, t: float, path: JumpPath) -> float:
    """Weight turning P-samples into samples of the measure conditioned on ``N_T = g``."""
    return conditional_density(g, t, path)


@nb.njit(cache=True, nogil=True)
def log_density_nb(x, n_t, tau, horizon):
    """Bessel closed form of ``log p^x_t`` with ``tau = T - t > 0``."""
    return (-2.0 * tau + log_bessel_i_nb(abs(x - n_t), 2.0 * tau)
            + 2.0 * horizon - log_bessel_i_nb(abs(x), 2.0 * horizon))


@nb.njit(cache=True, nogil=True)
def log_density_array(x, n_t, tau, horizon, out):
    for i in range(n_t.shape[0]):
        out[i] = log_density_nb(x, n_t[i], tau, horizon)


def density_bessel(x: int, n_t, t: float, horizon: float) -> np.ndarray:
    """Vectorised ``p^x_t`` for an array of ``N_t`` values (Bessel form)."""
    n_t = np.atleast_1d(np.asarray(n_t, dtype=np.int64))
    out = np.empty(n_t.shape[0])
    if t >= horizon:
        raise DomainError("use conditional_density for t = T")
    log_density_array(int(x), n_t, horizon - t, horizon, out)
    return np.exp(out)


@dataclass(frozen=True)
class InsiderIntensityPair:
    lambda1: float
    lambda2: float


@nb.njit(cache=True, nogil=True)
def intensities_nb(y, tau):
    """Insider intensities for remaining signal ``y = N_T - N_t`` and time to go ``tau``."""
    z = 2.0 * tau
    m = abs(y)
    up = bessel_ratio_up_nb(m, z)
    if m == 0:
        return up, up
    # I_{m-1} = I_{m+1} + (2m / z) I_m
    down = up + 2.0 * m / z
    if y > 0:
        return down, up
    return up, down


def insider_intensities(t: float, n_t: int, n_T: int, horizon: float) -> InsiderIntensityPair:
    """G-intensities ``I_|y-1|(2(T-t)) / I_|y|(2(T-t))`` and ``I_|y+1| / I_|y|`` of N1 and N2."""
    if not t < horizon:
        raise DomainError("insider intensities are defined for t < T")
    if t < 0:
        raise DomainError("t must be nonnegative")
    l1, l2 = intensities_nb(int(n_T) - int(n_t), horizon - t)
    return InsiderIntensityPair(float(l1), float(l2))


def terminal_log_pmf(x: int, horizon: float) -> float:
    """``log P[N_T = x]`` under unit intensities."""
    return log_skellam_pmf(x, horizon, horizon)
