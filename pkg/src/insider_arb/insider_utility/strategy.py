"""Log-optimal insider fraction and pathwise wealth."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import AdmissibilityError, DomainError
from ..poisson_market.density import intensities_nb
from ..poisson_market.paths import JumpPath

E = math.e
UP = E - 1.0            # relative price move at an N1 jump
DOWN = 1.0 / E - 1.0    # relative price move at an N2 jump
PI_LOW = -1.0 / UP
PI_HIGH = 1.0 / (1.0 - 1.0 / E)


class DegenerateInputError(DomainError):
    """Both intensities vanish; the caller should hold no stock."""


def optimal_fraction(lambda1: float, lambda2: float) -> float:
    """Fraction of wealth in the stock maximising the log-growth rate.

    ``pi = (l1 (e-1) + l2 (1/e-1)) / ((e-1)(1-1/e)(l1+l2))``.  The value lies
    in ``[-1/(e-1), 1/(1-1/e)]`` and touches an endpoint only when one
    intensity is zero; see :func:`fraction_on_boundary`.
    """
    l1, l2 = float(lambda1), float(lambda2)
    if not (l1 >= 0 and l2 >= 0) or not (math.isfinite(l1) and math.isfinite(l2)):
        raise DomainError("intensities must be finite and nonnegative")
    s = l1 + l2
    if s == 0.0:
        raise DegenerateInputError("lambda1 = lambda2 = 0")
    if l1 == l2:
        return 0.5
    return (l1 * UP + l2 * DOWN) / (UP * (1.0 - 1.0 / E) * s)


def fraction_on_boundary(lambda1: float, lambda2: float) -> bool:
    """True when the optimal fraction sits on the edge of the admissible interval."""
    return (lambda1 == 0.0) != (lambda2 == 0.0)


@dataclass(frozen=True)
class EpsilonStopping:
    """Stop trading once an insider intensity leaves ``(eps, 1/eps)``.

    ``epsilon = 0`` disables stopping; otherwise ``0 < epsilon < 1``.
    """

    epsilon: float = 1e-3

    def __post_init__(self):
        if not (0.0 <= self.epsilon < 1.0):
            raise DomainError("epsilon must lie in [0, 1)")

    @classmethod
    def never(cls) -> "EpsilonStopping":
        return cls(0.0)

    def inside(self, value: float) -> bool:
        if self.epsilon == 0.0:
            return True
        return self.epsilon < value < 1.0 / self.epsilon


@dataclass(frozen=True)
class WealthPath:
    """Wealth ``V_0 = 1`` multiplied by one factor per traded jump."""

    jump_times: tuple[float, ...]
    factors: tuple[float, ...]
    log_wealth: float
    stopped: bool
    initial: float = 1.0

    def __post_init__(self):
        if any(not f > 0 for f in self.factors):
            raise AdmissibilityError("wealth factor must be positive")

    @property
    def terminal_wealth(self) -> float:
        return self.initial * math.exp(self.log_wealth)


def simulate_log_wealth(path: JumpPath, stopping: EpsilonStopping = EpsilonStopping()) -> WealthPath:
    """Log-wealth of the insider playing the optimal fraction until ``tau_eps``.

    Between jumps the intensities are monotone in time, so ``tau_eps`` falls
    before the next jump exactly when an intensity at the segment start or
    at the jump's left limit is outside ``(eps, 1/eps)``.  The fraction used
    for a jump is computed from the left limit; the insider knows ``N_T``.
    """
    T = path.horizon
    times, marks = path.merged()
    y = path.n_terminal
    t_prev = 0.0
    factors: list[float] = []
    traded: list[float] = []
    active = True
    for t, m in zip(times.tolist(), marks.tolist()):
        l1s, l2s = intensities_nb(y, T - t_prev)
        l1, l2 = intensities_nb(y, T - t)
        if active and not all(stopping.inside(v) for v in (l1s, l2s, l1, l2)):
            active = False
        if active:
            pi = optimal_fraction(l1, l2)
            f = 1.0 + (UP if m > 0 else DOWN) * pi
            if not f > 0:
                raise AdmissibilityError(f"factor {f} at t={t}")
            factors.append(f)
            traded.append(t)
        y -= m
        t_prev = t
    log_v = math.fsum(math.log(f) for f in factors)
    return WealthPath(tuple(traded), tuple(factors), log_v, not active)
