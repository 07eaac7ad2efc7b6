from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InvariantError
from ..kernels.parallel import run_chunked
from ..kernels.streams import MASK64, SeededStream
from . import _kernels
from .paths import JumpPath, MarketParams, PathEnsemble


def _u64(seed: int) -> np.uint64:
    return np.uint64(int(seed) & MASK64)


def simulate_path(params: MarketParams, stream: SeededStream) -> JumpPath:
    """One path of two independent Poisson processes.

    Events of the superposed process arrive at rate ``r1 + r2`` and are marked
    N1 with probability ``r1 / (r1 + r2)``; the ensemble kernels use the same
    draw order, so a path and its ensemble twin agree bit for bit.
    """
    rate = params.intensity1 + params.intensity2
    j1: list[float] = []
    j2: list[float] = []
    if rate > 0:
        t = 0.0
        while True:
            t += stream.exponential(rate)
            if t > params.horizon:
                break
            if stream.uniform() * rate < params.intensity1:
                j1.append(t)
            else:
                j2.append(t)
    return JumpPath(tuple(j1), tuple(j2), params.horizon)


def simulate_ensemble(params: MarketParams, n_paths: int, seed: int, first_index: int = 0,
                      threads: int | None = None) -> PathEnsemble:
    """Paths ``first_index, ..., first_index + n_paths - 1`` of stream family ``seed``."""
    s = _u64(seed)
    counts = np.zeros(n_paths, dtype=np.int64)
    args = (params.horizon, params.intensity1, params.intensity2)
    run_chunked(lambda lo, hi: _kernels.sim_counts(s, first_index, lo, hi, *args, counts), n_paths, threads)
    offsets = np.zeros(n_paths + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    times = np.empty(offsets[-1], dtype=float)
    marks = np.empty(offsets[-1], dtype=np.int8)
    run_chunked(lambda lo, hi: _kernels.sim_fill(s, first_index, lo, hi, *args, offsets, times, marks),
                n_paths, threads)
    return PathEnsemble(params.horizon, offsets, times, marks, seed=seed, first_index=first_index)


@dataclass(frozen=True)
class TiltControls:
    """Piecewise-constant N1 intensity under a candidate martingale measure.

    ``alpha1 = high`` until ``N1 - N2`` first equals ``level``, then ``low``;
    with ``level=None`` the control is the constant ``high``.  The N2
    intensity is always ``e * alpha1``, which is what makes ``S`` a martingale.
    """

    high: float
    low: float | None = None
    level: int | None = None

    def __post_init__(self):
        low = self.high if self.low is None else self.low
        object.__setattr__(self, "low", float(low))
        if not (self.high > 0 and self.low > 0):
            raise InvariantError("controls must be strictly positive")
        if self.level is not None and self.low > self.high:
            raise DomainError("need high >= low for a switching control")

    @classmethod
    def constant(cls, value: float) -> "TiltControls":
        return cls(value)

    @property
    def alpha2_ratio(self) -> float:
        return math.e

    def alpha1(self, hit: bool) -> float:
        return self.low if hit else self.high


@dataclass(frozen=True)
class TiltedPath:
    path: JumpPath
    log_density: float
    hit_time: float


def simulate_tilted_path(params: MarketParams, controls: TiltControls, stream: SeededStream) -> TiltedPath:
    """Draw events at the exact rate ``(1 + e) * alpha1``, restarting at the switch.

    The control changes only at event times, so no thinning is needed.
    Mirrors the ensemble kernel draw for draw.  ``log_density`` is
    ``log dPbar/dP`` on F_T for the unit-intensity reference measure.
    """
    e = math.e
    hit = controls.level == 0
    tau = 0.0 if hit else math.inf
    a = controls.alpha1(hit)
    t = last = logz = 0.0
    j1: list[float] = []
    j2: list[float] = []
    while True:
        lam = (1.0 + e) * a
        t += stream.exponential(lam)
        if t > params.horizon:
            break
        v = stream.uniform() * lam
        if v < a:
            logz += math.log(a) - ((1 + e) * a - 2.0) * (t - last)
            j1.append(t)
        else:
            logz += 1.0 + math.log(a) - ((1 + e) * a - 2.0) * (t - last)
            j2.append(t)
        last = t
        if controls.level is not None and not hit and len(j1) - len(j2) == controls.level:
            hit, tau = True, t
            a = controls.low
    logz -= ((1 + e) * a - 2.0) * (params.horizon - last)
    return TiltedPath(JumpPath(tuple(j1), tuple(j2), params.horizon), logz, tau)


@dataclass
class TiltedEnsemble:
    n1: np.ndarray
    n2: np.ndarray
    hit_time: np.ndarray
    log_density: np.ndarray
    first_jump1: np.ndarray
    first_jump2: np.ndarray

    @property
    def n_terminal(self) -> np.ndarray:
        return self.n1 - self.n2


def simulate_tilted_ensemble(params: MarketParams, controls: TiltControls, n_paths: int, seed: int,
                             first_index: int = 0, threads: int | None = None) -> TiltedEnsemble:
    s = _u64(seed)
    out = [np.empty(n_paths, dtype=np.int64), np.empty(n_paths, dtype=np.int64)] + \
          [np.empty(n_paths, dtype=float) for _ in range(4)]
    has_level = controls.level is not None
    level = int(controls.level) if has_level else 0
    run_chunked(lambda lo, hi: _kernels.tilted_kernel(s, first_index, lo, hi, params.horizon, controls.high,
                                                      controls.low, level, has_level, *out),
                n_paths, threads)
    return TiltedEnsemble(*out)
