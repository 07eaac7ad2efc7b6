"""First passage of N1 - N2 above a level."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..kernels.parallel import run_chunked
from ..kernels.stats import Estimate, mean_se, proportion
from . import _kernels
from .paths import JumpPath
from .simulate import _u64

DEFAULT_HORIZON = 50.0


@dataclass
class PassageEnsemble:
    """Running maxima of ``N1 - N2`` on ``[0, horizon]`` for many paths.

    ``hit_times[i, k]`` is the first time path ``i`` reaches level ``k``
    (``inf`` if never, ``0`` for ``k = 0``).  Paths stop once ``max_level`` is
    hit, so ``n_end`` is only meaningful for paths that did not reach it.
    """

    horizon: float
    rates: tuple[float, float]
    max_level: int
    running_max: np.ndarray
    hit_times: np.ndarray
    n_end: np.ndarray

    def __len__(self) -> int:
        return self.running_max.shape[0]

    def hits(self, level: int) -> np.ndarray:
        if level <= 0:
            return np.ones(len(self), dtype=bool)
        if level > self.max_level:
            raise ValueError(f"level {level} above simulated max_level {self.max_level}")
        return self.running_max >= level


@dataclass(frozen=True)
class PassageStats:
    level: int
    estimate: Estimate
    truncation_bias_bound: float
    mean_hit_time: float

    @property
    def note(self) -> str:
        return (f"estimate on [0, horizon] undershoots the infinite-horizon probability by at most "
                f"{self.truncation_bias_bound:.3g} (Doob bound on the exponential martingale)")


def simulate_passage(n_paths: int, seed: int, max_level: int, horizon: float = DEFAULT_HORIZON,
                     rates: tuple[float, float] = (1.0, math.e), first_index: int = 0,
                     threads: int | None = None) -> PassageEnsemble:
    """Simulate ``n_paths`` paths under constant ``rates`` (default: the ``(1, e)`` martingale measure)."""
    s = _u64(seed)
    running_max = np.empty(n_paths, dtype=np.int64)
    hit_times = np.full((n_paths, max_level + 1), np.inf)
    n_end = np.empty(n_paths, dtype=np.int64)
    r1, r2 = map(float, rates)
    run_chunked(lambda lo, hi: _kernels.first_passage_kernel(s, first_index, lo, hi, horizon, r1, r2, max_level,
                                                             running_max, hit_times, n_end), n_paths, threads)
    return PassageEnsemble(horizon, (r1, r2), max_level, running_max, hit_times, n_end)


def first_passage(ensemble: PassageEnsemble, level: int) -> PassageStats:
    hits = ensemble.hits(level)
    est = proportion(hits)
    r1, r2 = ensemble.rates
    if level <= 0:
        bias = 0.0
    elif r2 > r1 > 0:
        # exp(theta N) is a martingale for theta = log(r2 / r1)
        theta = math.log(r2 / r1)
        tail = np.where(hits, 0.0, np.exp(theta * (ensemble.n_end - level)))
        bias = float(mean_se(tail).mean)
    else:
        bias = math.inf
    if level <= 0:
        mean_t = 0.0
    else:
        times = ensemble.hit_times[hits, level]
        mean_t = float(mean_se(times).mean) if times.size else math.nan
    return PassageStats(level, est, bias, mean_t)


def recursion_residual(ensemble: PassageEnsemble, level: int) -> Estimate:
    """``f(x+1) - f(x) - (f(x) - f(x-1)) / e`` with an SE that keeps the covariances."""
    if level < 1:
        raise ValueError("recursion needs level >= 1")
    h = [ensemble.hits(level + d).astype(float) for d in (-1, 0, 1)]
    return mean_se(h[2] - h[1] - (h[1] - h[0]) / math.e)


def first_passage_path(path: JumpPath, level: int) -> tuple[bool, float]:
    """Whether ``N1 - N2`` reaches ``level`` on ``[0, T]`` along ``path`` and when."""
    if level <= 0:
        return True, 0.0
    times, marks = path.merged()
    n = np.cumsum(marks.astype(np.int64))
    idx = np.flatnonzero(n >= level)
    if idx.size == 0:
        return False, math.inf
    return True, float(times[idx[0]])
