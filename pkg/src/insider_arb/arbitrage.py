"""Superhedging prices and optimal arbitrage in the two-Poisson market.

The public superhedging price of ``1{N_T = x}`` is 1 for ``x <= 0`` and
``e^{-x}`` for ``x > 0``.  The insider, who knows ``N_T``, pays the price of
the event that actually happens, so the constant claim 1 costs ``e^{-N_T}``
on ``{N_T > 0}``: arbitrage that is optimal but not strong.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, InvariantError
from .kernels.distributions import SkellamParams, skellam_pmf, skellam_support
from .kernels.stats import Estimate, proportion
from .poisson_market.paths import JumpPath, MarketParams
from .poisson_market.simulate import TiltControls, simulate_tilted_ensemble

COVERAGE = 1e-10


def superhedge_indicator_public(x: int) -> float:
    """Public superhedging price of ``1{N_T = x}``."""
    x = int(x)
    return 1.0 if x <= 0 else math.exp(-x)


@dataclass(frozen=True)
class SuperhedgePriceMap:
    prices: dict[int, float]
    low: int
    high: int
    mass: float

    def __post_init__(self):
        for g, p in self.prices.items():
            if not (0.0 <= p <= 1.0):
                raise InvariantError(f"price {p} for g={g} outside [0, 1]")

    def __getitem__(self, g: int) -> float:
        return self.prices[int(g)]

    def records(self) -> list[dict]:
        return [{"g": g, "price": p, "analytic": True} for g, p in sorted(self.prices.items())]


def superhedge_insider_combine(low: int | None = None, high: int | None = None, horizon: float = 1.0,
                               coverage: float = COVERAGE) -> SuperhedgePriceMap:
    """Insider price of the constant claim 1, one public price per value of ``N_T``.

    Without a range the symmetric Skellam window holding ``1 - coverage`` is
    used; an explicit range that holds less raises :class:`CoverageError`.
    """
    params = SkellamParams(horizon, horizon)
    if low is None or high is None:
        lo, hi = skellam_support(params, coverage)
        low = lo if low is None else low
        high = hi if high is None else high
    if low > high:
        raise CoverageError("empty range")
    mass = math.fsum(skellam_pmf(k, params) for k in range(low, high + 1))
    if mass < 1.0 - coverage:
        raise CoverageError(f"range [{low}, {high}] holds mass {mass:.12g} < 1 - {coverage:g}")
    return SuperhedgePriceMap({g: superhedge_indicator_public(g) for g in range(low, high + 1)}, low, high, mass)


class Verdict(str, enum.Enum):
    NONE = "None"
    OPTIMAL = "Optimal"
    STRONG = "StrongOptimal"


@dataclass(frozen=True)
class ArbitrageVerdict:
    verdict: Verdict
    witnesses: tuple[int, ...]

    def record(self) -> dict:
        return {"verdict": self.verdict.value, "witnesses": list(self.witnesses)}


def classify_arbitrage(price_map: SuperhedgePriceMap | dict) -> ArbitrageVerdict:
    prices = price_map.prices if isinstance(price_map, SuperhedgePriceMap) else dict(price_map)
    if not prices:
        raise InvariantError("empty price map")
    for g, p in prices.items():
        if not (0.0 <= p <= 1.0):
            raise InvariantError(f"price {p} for g={g} outside [0, 1]")
    cheap = tuple(sorted(g for g, p in prices.items() if p < 1.0))
    if not cheap:
        return ArbitrageVerdict(Verdict.NONE, ())
    if len(cheap) == len(prices):
        return ArbitrageVerdict(Verdict.STRONG, cheap)
    return ArbitrageVerdict(Verdict.OPTIMAL, cheap)


@dataclass(frozen=True)
class Replication:
    initial_cost: float
    terminal_wealth: float
    min_wealth: float


def replicate_buy_and_hold(path: JumpPath) -> Replication:
    """Buy ``1/S_T`` shares at time 0 and hold: the claim 1 is met exactly.

    The position is ``e^{-N_T}`` units, so wealth at ``t`` is
    ``e^{-N_T} S_t`` and terminal wealth is ``e^{-N_T} e^{N_T}``.
    """
    n_T = path.n_terminal
    units = math.exp(-n_T)
    cost = units
    gain = units * (math.exp(n_T) - 1.0)
    times, marks = path.merged()
    n = np.concatenate([[0], np.cumsum(marks.astype(np.int64))])
    return Replication(cost, cost + gain, float(units * np.exp(n).min()))


def replicate_ensemble(n_terminal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised initial costs and terminal wealths of buy-and-hold."""
    n = np.asarray(n_terminal, dtype=float)
    cost = np.exp(-n)
    return cost, cost + cost * (np.exp(n) - 1.0)


@dataclass(frozen=True)
class ProbeResult:
    x: int
    controls: TiltControls
    estimate: Estimate
    price: float

    @property
    def weak_duality_ok(self) -> bool:
        return self.estimate.mean <= self.price + 3 * self.estimate.se


def mc_emm_probe(x: int, controls: TiltControls | None = None, n_paths: int = 100_000, seed: int = 0,
                 horizon: float = 1.0, threads: int | None = None, high: float = 100.0,
                 low: float = 0.01) -> ProbeResult:
    """Estimate ``Pbar[N_T = x]`` under a switching martingale measure.

    By default ``alpha1 = high`` until ``N`` first reaches ``x`` and ``low``
    afterwards, the construction that pushes ``Pbar[N_T = x]`` towards the
    public price.  Any probe is a lower bound for the price.
    """
    x = int(x)
    if controls is None:
        controls = TiltControls(high, low, x)
    ens = simulate_tilted_ensemble(MarketParams(horizon), controls, n_paths, seed, threads=threads)
    return ProbeResult(x, controls, proportion(ens.n_terminal == x), superhedge_indicator_public(x))


@dataclass(frozen=True)
class JumpRace:
    first_n1: Estimate
    ratios: np.ndarray
    censored: int


def first_jump_race(n_paths: int, seed: int, horizon: float = 50.0, threads: int | None = None) -> JumpRace:
    """First jumps ``tau1``, ``tau2`` of N1 and N2 under the rates ``(1, e)``.

    ``P[tau1 < tau2] = 1/(1+e)`` and ``tau1 / (e tau2)`` has density
    ``1/(1+z)^2``.  Paths where either first jump falls after ``horizon``
    are dropped and counted in ``censored``.
    """
    ens = simulate_tilted_ensemble(MarketParams(horizon), TiltControls.constant(1.0), n_paths, seed,
                                   threads=threads)
    ok = np.isfinite(ens.first_jump1) & np.isfinite(ens.first_jump2)
    t1, t2 = ens.first_jump1[ok], ens.first_jump2[ok]
    return JumpRace(proportion(t1 < t2), t1 / (math.e * t2), int((~ok).sum()))


def skellam_probe_target(x: int, horizon: float) -> float:
    """``P[N_T = x]`` under the rates ``(1, e)``: Skellam with means ``(T, eT)``."""
    return skellam_pmf(int(x), SkellamParams(horizon, math.e * horizon))


def mean_wealth_error(n_terminal: np.ndarray) -> float:
    _, w = replicate_ensemble(n_terminal)
    return float(np.max(np.abs(w - 1.0))) if w.size else 0.0


__all__ = [
    "superhedge_indicator_public", "SuperhedgePriceMap", "superhedge_insider_combine", "Verdict",
    "ArbitrageVerdict", "classify_arbitrage", "Replication", "replicate_buy_and_hold", "replicate_ensemble",
    "ProbeResult", "mc_emm_probe", "JumpRace", "first_jump_race", "skellam_probe_target", "mean_wealth_error",
]
