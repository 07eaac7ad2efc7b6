"""Partitions of a continuous signal and the entropy/width decomposition."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..errors import DomainError

MODES = ("equal_width", "equal_mass")
DEFAULT_RANGE = (-5.0, 5.0)


def _entropy(probs) -> float:
    return -math.fsum(p * math.log(p) for p in probs if p > 0)


def cell_probabilities(dist, edges) -> np.ndarray:
    """``P[G in (e_i, e_{i+1}]]`` using the survival function right of the median."""
    edges = np.asarray(edges, dtype=float)
    med = float(dist.median())
    lo, hi = edges[:-1], edges[1:]
    right = lo >= med
    p = np.where(right, dist.sf(lo) - dist.sf(hi), dist.cdf(hi) - dist.cdf(lo))
    return np.maximum(p, 0.0)


@dataclass(frozen=True)
class PartitionSpec:
    """Increasing cell boundaries with the mass and width of every cell.

    Cells are ``(edges[i], edges[i+1]]``; outer edges may be infinite.
    ``mass`` is the probability of the covered range.
    """

    edges: tuple[float, ...]
    probs: tuple[float, ...]
    mode: str
    mass: float

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        if e.size < 2 or not np.all(np.diff(e) > 0):
            raise DomainError("partition edges must be strictly increasing")
        if len(self.probs) != e.size - 1:
            raise DomainError("need one probability per cell")
        if abs(math.fsum(self.probs) - self.mass) > 1e-12:
            raise DomainError("cell probabilities do not add up to the range mass")

    @property
    def n(self) -> int:
        return len(self.probs)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.asarray(self.edges, dtype=float))

    @property
    def entropy(self) -> float:
        """``H(G^n) = -sum P log P`` over the cells."""
        return _entropy(self.probs)

    @property
    def covers_line(self) -> bool:
        return self.edges[0] == -math.inf and self.edges[-1] == math.inf

    def closed(self, dist) -> "PartitionSpec":
        """Same cells plus the two outer half-lines, so that every real value has a cell."""
        if self.covers_line:
            return self
        edges = list(self.edges)
        if edges[0] > -math.inf:
            edges.insert(0, -math.inf)
        if edges[-1] < math.inf:
            edges.append(math.inf)
        p = cell_probabilities(dist, edges)
        return PartitionSpec(tuple(edges), tuple(float(x) for x in p), self.mode, math.fsum(p.tolist()))

    def merged_pairs(self) -> tuple[float, ...]:
        """Masses of the partition obtained by merging cells ``2i`` and ``2i+1``."""
        if self.n % 2:
            raise DomainError("need an even number of cells")
        return tuple(self.probs[2 * i] + self.probs[2 * i + 1] for i in range(self.n // 2))


def make_partition(dist, n: int, mode: str = "equal_mass", value_range=DEFAULT_RANGE) -> PartitionSpec:
    """``n`` cells of a scipy frozen distribution.

    ``equal_mass`` cuts at the quantiles ``k / n`` (the outer cells reach the
    ends of the support); ``equal_width`` splits ``value_range`` evenly.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    if mode == "equal_mass":
        edges = np.asarray(dist.ppf(np.arange(n + 1) / n), dtype=float)
        if not np.all(np.diff(edges) > 0):
            raise DomainError(f"quantiles of order {n} are not distinct in floating point")
        probs = np.full(n, 1.0 / n)
        inner = cell_probabilities(dist, edges)
        if np.max(np.abs(inner - probs)) > 1e-12:
            raise DomainError(f"quantile cells of order {n} are not resolved to 1e-12")
        return PartitionSpec(tuple(edges.tolist()), tuple(probs.tolist()), mode, 1.0)
    if mode == "equal_width":
        lo, hi = map(float, value_range)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise DomainError("equal_width needs a finite range lo < hi")
        edges = np.linspace(lo, hi, n + 1)
        if not np.all(np.diff(edges) > 0):
            raise DomainError(f"{n} cells are too narrow for the range")
        probs = cell_probabilities(dist, edges)
        return PartitionSpec(tuple(edges.tolist()), tuple(probs.tolist()), mode, math.fsum(probs.tolist()))
    raise DomainError(f"unknown partition mode {mode!r}; expected one of {MODES}")


def differential_entropy(dist) -> float:
    """``-int f log f`` by adaptive quadrature over the support."""
    lo, hi = dist.support()

    def f(x):
        lp = dist.logpdf(x)
        return 0.0 if not math.isfinite(lp) else -math.exp(lp) * lp

    if math.isfinite(lo) and math.isfinite(hi):
        return integrate.quad(f, lo, hi, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    med = float(dist.median())
    left = integrate.quad(f, lo, med, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    right = integrate.quad(f, med, hi, limit=400, epsabs=1e-13, epsrel=1e-12)[0]
    return left + right


@dataclass(frozen=True)
class EntropySplit:
    n: int
    entropy: float
    differential: float
    width_term: float

    @property
    def residual(self) -> float:
        return self.entropy - (self.differential + self.width_term)


def entropy_decomposition_check(dist, partition: PartitionSpec) -> EntropySplit:
    """``H(G^n)`` against ``-int f log f - sum log|cell| P[cell]`` on an equal-width partition."""
    w = partition.widths
    if not np.all(np.isfinite(w)):
        raise DomainError("the width term needs finite cells")
    width_term = -math.fsum(p * math.log(x) for p, x in zip(partition.probs, w.tolist()) if p > 0)
    return EntropySplit(partition.n, partition.entropy, differential_entropy(dist), width_term)


def chain_rule_check(partition: PartitionSpec) -> tuple[float, float, bool]:
    """``(H(G^n), H(G^{2n}), H(G^{2n}) >= H(G^n))`` for ``partition`` and its pairwise merge."""
    fine = partition.entropy
    coarse = _entropy(partition.merged_pairs())
    return coarse, fine, fine >= coarse
