"""Order-independent Monte Carlo summaries.

Sums use :func:`math.fsum`, which is correctly rounded and therefore gives the
same bits whatever order per-path values arrive in.  Combined with per-path
streams this makes every reported number independent of the worker count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float
    n: int

    def within(self, target: float, k: float = 3.0, floor: float = 0.0) -> bool:
        return abs(self.mean - target) <= max(k * self.se, floor)


def exact_sum(values) -> float:
    if not isinstance(values, np.ndarray):
        values = np.fromiter(values, dtype=float) if not isinstance(values, (list, tuple)) else values
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def mean_se(values) -> Estimate:
    x = np.asarray(values, dtype=float).ravel()
    n = x.size
    if n == 0:
        return Estimate(math.nan, math.nan, 0)
    m = math.fsum(x.tolist()) / n
    if n == 1:
        return Estimate(m, math.nan, 1)
    var = math.fsum(((x - m) ** 2).tolist()) / (n - 1)
    return Estimate(m, math.sqrt(var / n), n)


def proportion(hits) -> Estimate:
    h = np.asarray(hits, dtype=bool).ravel()
    n = h.size
    p = int(h.sum()) / n
    return Estimate(p, math.sqrt(max(p * (1.0 - p), 0.0) / n), n)


def ks_statistic(samples, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance between samples and a CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    f = cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))
