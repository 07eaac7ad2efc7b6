"""Skellam law of N1 - N2 and the exponential-ratio law."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba as nb

from ..errors import DomainError
from .bessel import log_bessel_i_nb
from .streams import SeededStream


@dataclass(frozen=True)
class SkellamParams:
    mu1: float
    mu2: float

    def __post_init__(self):
        for name in ("mu1", "mu2"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise DomainError(f"{name} must be finite and nonnegative, got {v}")

    @property
    def mean(self) -> float:
        return self.mu1 - self.mu2

    @property
    def variance(self) -> float:
        return self.mu1 + self.mu2


@nb.njit(cache=True, nogil=True)
def log_skellam_pmf_nb(k, mu1, mu2):
    if mu1 == 0.0 and mu2 == 0.0:
        return 0.0 if k == 0 else -math.inf
    if mu2 == 0.0:
        if k < 0:
            return -math.inf
        return -mu1 + k * math.log(mu1) - math.lgamma(k + 1.0)
    if mu1 == 0.0:
        if k > 0:
            return -math.inf
        return -mu2 - k * math.log(mu2) - math.lgamma(-k + 1.0)
    return -(mu1 + mu2) + 0.5 * k * (math.log(mu1) - math.log(mu2)) + log_bessel_i_nb(abs(k), 2.0 * math.sqrt(mu1 * mu2))


def _params(params, mu2=None) -> SkellamParams:
    if isinstance(params, SkellamParams):
        return params
    return SkellamParams(float(params), float(mu2))


def log_skellam_pmf(k: int, params: SkellamParams | float, mu2: float | None = None) -> float:
    p = _params(params, mu2)
    return float(log_skellam_pmf_nb(int(k), p.mu1, p.mu2))


def skellam_pmf(k: int, params: SkellamParams | float, mu2: float | None = None) -> float:
    """P[N1 - N2 = k] for independent Poisson counts with means ``mu1`` and ``mu2``.

    Uses ``exp(-(mu1+mu2)) (mu1/mu2)^(k/2) I_|k|(2 sqrt(mu1 mu2))`` in log space.
    """
    return math.exp(log_skellam_pmf(k, params, mu2))


def skellam_support(params: SkellamParams, tail_tol: float = 1e-12) -> tuple[int, int]:
    """Smallest symmetric window around the mean holding mass >= 1 - tail_tol."""
    center = int(round(params.mean))
    half = 0
    mass = skellam_pmf(center, params)
    while 1.0 - mass > tail_tol:
        half += 1
        mass += skellam_pmf(center - half, params) + skellam_pmf(center + half, params)
        if half > 100000:
            raise DomainError("Skellam support search did not terminate")
    return center - half, center + half


def _tail_entropy_bound(p_edge: float, p_next: float) -> float:
    # Skellam is log-concave, so tail terms are dominated by a geometric
    # sequence with the edge ratio; -p log p is increasing for p < 1/e.
    if p_edge <= 0.0:
        return 0.0
    r = p_next / p_edge
    if r >= 1.0 or p_next <= 0.0 or p_edge > math.exp(-1.0):
        return math.inf
    # sum_{j>=1} q r^j (-log q - j log r), q = p_edge
    s1 = r / (1.0 - r)
    s2 = r / (1.0 - r) ** 2
    return p_edge * (-math.log(p_edge) * s1 - math.log(r) * s2)


def skellam_entropy(params: SkellamParams | float, mu2: float | None = None, tail_tol: float = 1e-12,
                    window: tuple[int, int] | None = None, return_bound: bool = False):
    """Shannon entropy ``-sum_k p_k log p_k`` of the Skellam law.

    The sum runs over the symmetric window holding mass ``1 - tail_tol`` unless
    an explicit ``window`` is given.  With ``return_bound`` the function also
    returns an upper bound on the entropy of the omitted tails.
    """
    p = _params(params, mu2)
    if not (0.0 < tail_tol <= 1e-6):
        raise DomainError("tail_tol must lie in (0, 1e-6]")
    lo, hi = window if window is not None else skellam_support(p, tail_tol)
    terms = []
    for k in range(lo, hi + 1):
        lp = log_skellam_pmf(k, p)
        if lp > -math.inf:
            terms.append(-math.exp(lp) * lp)
    h = math.fsum(terms)
    if not return_bound:
        return h
    bound = (_tail_entropy_bound(skellam_pmf(hi, p), skellam_pmf(hi + 1, p))
             + _tail_entropy_bound(skellam_pmf(lo, p), skellam_pmf(lo - 1, p)))
    return h, bound


# --- ratio of exponentials ---------------------------------------------------

def ratio_exp_cdf(z: float) -> float:
    """CDF ``z / (1 + z)`` of ``alpha X / (beta Y)``, X ~ Exp(alpha), Y ~ Exp(beta)."""
    if not z > 0:
        raise DomainError("ratio_exp_cdf needs z > 0")
    return z / (1.0 + z)


def ratio_exp_pdf(z: float) -> float:
    if not z > 0:
        raise DomainError("ratio_exp_pdf needs z > 0")
    return 1.0 / (1.0 + z) ** 2


def ratio_exp_sample(alpha: float, beta: float, stream: SeededStream) -> float:
    if alpha <= 0 or beta <= 0:
        raise DomainError("rates must be positive")
    x = stream.exponential(alpha)
    y = stream.exponential(beta)
    return alpha * x / (beta * y)
