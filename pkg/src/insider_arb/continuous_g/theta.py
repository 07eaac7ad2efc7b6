"""Jump market with ``theta N1 + (1 - theta) N2`` shocks and its bounded martingale densities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from ..errors import DomainError
from ..poisson_market.paths import MarketParams, PathEnsemble
from ..poisson_market.simulate import simulate_ensemble

VIOLATION_TOL = 1e-12


def _default_sigma(t):
    return 0.5 + 0.25 * np.sin(2.0 * math.pi * np.asarray(t, dtype=float))


@dataclass(frozen=True)
class ThetaMarket:
    """``dS = S_- sigma(t) (theta dN1 + (1 - theta) dN2 - dt)`` with unit-intensity ``N1, N2``.

    A martingale density has intensities ``(alpha1, alpha2)`` with
    ``theta alpha1 + (1 - theta) alpha2 = 1``, so ``alpha1`` alone
    parametrises it.
    """

    theta: float = 0.3
    horizon: float = 1.0
    sigma: Callable = _default_sigma

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise DomainError("theta must lie in (0, 1)")

    def alpha2(self, alpha1):
        return (1.0 - self.theta * np.asarray(alpha1, dtype=float)) / (1.0 - self.theta)

    def log_bound(self, n1, n2):
        """``log(e^{2T} theta^{-N1} (1 - theta)^{-N2})``."""
        return 2.0 * self.horizon - np.asarray(n1) * math.log(self.theta) - np.asarray(n2) * math.log1p(-self.theta)

    def terminal_price(self, ensemble: PathEnsemble) -> np.ndarray:
        """``S_T`` from ``S_0 = 1``: the non-atomic signal of the example."""
        drift = integrate.quad(lambda t: float(self.sigma(t)), 0.0, self.horizon)[0]
        sig = self.sigma(ensemble.times)
        jump = np.where(ensemble.marks > 0, self.theta, 1.0 - self.theta) * sig
        idx = np.repeat(np.arange(len(ensemble)), np.diff(ensemble.offsets))
        logs = np.bincount(idx, weights=np.log1p(jump), minlength=len(ensemble))
        return np.exp(logs - drift)


@dataclass(frozen=True)
class PiecewiseControl:
    """Deterministic ``alpha1`` equal to ``values[k]`` on ``[knots[k], knots[k+1])``."""

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.knots) != len(self.values) + 1 or self.knots[0] != 0.0:
            raise DomainError("need knots 0 = t_0 < ... < t_K and K values")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise DomainError("knots must increase")

    @classmethod
    def constant(cls, value: float, horizon: float) -> "PiecewiseControl":
        return cls((0.0, float(horizon)), (float(value),))

    def at(self, t) -> np.ndarray:
        k = np.searchsorted(np.asarray(self.knots), t, side="right") - 1
        return np.asarray(self.values)[np.clip(k, 0, len(self.values) - 1)]

    def feasible(self, theta: float) -> bool:
        return all(0.0 <= v <= 1.0 / theta for v in self.values)


def random_controls(market: ThetaMarket, count: int, rng: np.random.Generator,
                    max_pieces: int = 6) -> list[PiecewiseControl]:
    """Feasible piecewise-constant controls; every third one is pushed to a boundary value."""
    out = []
    top = 1.0 / market.theta
    for c in range(count):
        k = int(rng.integers(1, max_pieces + 1))
        inner = np.sort(rng.uniform(0.0, market.horizon, size=k - 1))
        knots = (0.0, *inner.tolist(), float(market.horizon))
        vals = rng.uniform(0.0, top, size=k)
        if c % 3 == 2:
            vals[int(rng.integers(0, k))] = top if rng.random() < 0.5 else 0.0
        out.append(PiecewiseControl(knots, tuple(float(v) for v in vals)))
    return out


def log_density(market: ThetaMarket, control: PiecewiseControl, ensemble: PathEnsemble) -> np.ndarray:
    """``log Z_T = -int (alpha1 + alpha2 - 2) dt + sum log alpha1(T1_i) + sum log alpha2(T2_j)``.

    A jump at a time where its intensity is zero gives ``-inf``.
    """
    if not control.feasible(market.theta):
        raise DomainError("control leaves [0, 1/theta]")
    knots = np.asarray(control.knots)
    a1 = np.asarray(control.values)
    a2 = market.alpha2(a1)
    comp = math.fsum(((a1 + a2 - 2.0) * np.diff(knots)).tolist())
    at1 = control.at(ensemble.times)
    lam = np.where(ensemble.marks > 0, at1, market.alpha2(at1))
    with np.errstate(divide="ignore"):
        logs = np.log(lam)
    idx = np.repeat(np.arange(len(ensemble)), np.diff(ensemble.offsets))
    total = np.zeros(len(ensemble))
    np.add.at(total, idx, logs)
    return total - comp


@dataclass(frozen=True)
class UIBoundResult:
    n_paths: int
    n_controls: int
    max_log_ratio: float
    violations: int
    mean_density: tuple[float, ...]

    @property
    def max_ratio(self) -> float:
        return math.exp(self.max_log_ratio) if self.max_log_ratio > -math.inf else 0.0

    @property
    def passed(self) -> bool:
        return self.violations == 0


def ui_bound_check(market: ThetaMarket, controls, n_paths: int, seed: int,
                   threads: int | None = None) -> UIBoundResult:
    """Pathwise ``Z_T <= e^{2T} theta^{-N1_T} (1 - theta)^{-N2_T}`` for every control on shared paths.

    A violation is a log ratio above ``VIOLATION_TOL``.  The MC mean of each
    ``Z_T`` is reported as a sanity check of the martingale property.
    """
    controls = list(controls)
    for c in controls:
        if not c.feasible(market.theta):
            raise DomainError(f"infeasible control {c.values}")
    ens = simulate_ensemble(MarketParams(market.horizon, 1.0, 1.0), n_paths, seed, threads=threads)
    bound = market.log_bound(ens.n1, ens.n2)
    worst = -math.inf
    bad = 0
    means = []
    for c in controls:
        r = log_density(market, c, ens) - bound
        worst = max(worst, float(np.max(r)))
        bad += int(np.count_nonzero(r > VIOLATION_TOL))
        means.append(math.fsum(np.exp(r + bound).tolist()) / n_paths)
    return UIBoundResult(n_paths, len(controls), worst, bad, tuple(means))
