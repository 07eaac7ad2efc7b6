"""Complete Brownian market with an insider who knows the cell of ``W_T``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special
from scipy.stats import norm

from ..errors import DomainError
from ..kernels.parallel import run_chunked
from ..kernels.stats import Estimate, mean_se
from ..poisson_market.simulate import _u64 as u64
from ._kernels import bs_kernel
from .partition import PartitionSpec, cell_probabilities, make_partition

GRID_KINDS = ("graded", "uniform")
DEFAULT_TAU_MIN = 1e-8
MAX_LOG_RATIO = 0.1
WINDOW = 40.0
CHECK_FRACTIONS = (0.25, 0.5, 0.75)
SQRT_2PI = math.sqrt(2.0 * math.pi)


class StabilityError(DomainError):
    """Endpoint cutoff and time grid are incompatible."""


@dataclass(frozen=True)
class BrownianMarket:
    """``S = exp(sigma W - sigma^2 t / 2)``: driftless, so the public log value is 0."""

    horizon: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not self.horizon > 0:
            raise DomainError("horizon must be positive")

    def terminal_law(self):
        """Law of ``W_T``, the signal the insider partitions."""
        return norm(scale=math.sqrt(self.horizon))


@dataclass(frozen=True)
class TimeGrid:
    """Simulation times ``t_0 = 0 < ... < t_m = T``; the value integrates up to ``T - delta``."""

    times: np.ndarray
    n_int: int
    kind: str

    @property
    def delta(self) -> float:
        return float(self.times[-1] - self.times[self.n_int])

    def nearest(self, t: float) -> int:
        return int(np.argmin(np.abs(self.times[: self.n_int + 1] - t)))


def time_grid(horizon: float, n_steps: int, delta: float | None = None, kind: str = "graded") -> TimeGrid:
    """Grid with ``n_steps`` integration intervals ending at ``T - delta``.

    ``graded``: half the steps uniform on ``[0, T/2]``, half geometric in the
    time to maturity from ``T/2`` down to ``delta`` (default ``1e-8 T``).
    ``uniform``: step ``T / n_steps``; ``delta`` (default ``8`` steps) must be
    a whole number of steps, and the integration stops there.
    """
    if n_steps < 2 or n_steps % 2:
        raise DomainError("n_steps must be even and >= 2")
    if kind == "graded":
        delta = DEFAULT_TAU_MIN * horizon if delta is None else float(delta)
        if not 0 < delta < horizon / 2:
            raise StabilityError("delta must lie in (0, T/2)")
        half = n_steps // 2
        ratio = math.log(horizon / 2 / delta) / (n_steps - half)
        if ratio > MAX_LOG_RATIO:
            raise StabilityError(f"delta={delta:g} needs more than {n_steps} steps "
                                 f"(log step ratio {ratio:.3f} > {MAX_LOG_RATIO})")
        head = np.linspace(0.0, horizon / 2, half + 1)[:-1]
        tail = horizon - np.geomspace(horizon / 2, delta, n_steps - half + 1)
        times = np.concatenate([head, tail, [horizon]])
        return TimeGrid(times, n_steps, kind)
    if kind == "uniform":
        h = horizon / n_steps
        delta = 8 * h if delta is None else float(delta)
        k = delta / h
        if delta < h or abs(k - round(k)) > 1e-9:
            raise StabilityError(f"delta={delta:g} is not a positive multiple of the step {h:g}")
        n_int = n_steps - int(round(k))
        if n_int < 2:
            raise StabilityError("delta leaves no integration interval")
        if n_int % 2:
            raise StabilityError("delta must leave an even number of intervals")
        return TimeGrid(np.linspace(0.0, horizon, n_steps + 1), n_int, kind)
    raise DomainError(f"unknown grid kind {kind!r}; expected one of {GRID_KINDS}")


def truncated_entropy(partition: PartitionSpec, horizon: float, delta: float) -> float:
    """``I(G; W_{T-delta}) = H(G) - E[H(G | W_{T-delta})]``, the exact value of the truncated problem.

    The conditional entropy vanishes away from the cell edges, so it is
    integrated over windows of ``WINDOW * sqrt(delta)`` around them.
    """
    edges = np.asarray(partition.edges, dtype=float)
    inner = edges[1:-1]
    if inner.size == 0:
        return 0.0
    s = math.sqrt(horizon - delta)
    d = math.sqrt(delta)
    def f(w):
        z = (edges - w) / d
        p = np.diff(special.ndtr(z))
        p = p[p > 0]
        return -float(np.sum(p * np.log(p))) * math.exp(-0.5 * (w / s) ** 2) / (s * SQRT_2PI)

    half = WINDOW * d
    windows = []
    for e in inner:
        a, b = max(e - half, -12 * s), min(e + half, 12 * s)
        if a >= b:
            continue
        if windows and a <= windows[-1][1]:
            windows[-1][1] = b
        else:
            windows.append([a, b])
    cond = []
    for a, b in windows:
        pts = [e for e in inner if a < e < b]
        cond.append(integrate.quad(f, a, b, points=pts[:200] or None, limit=4000,
                                   epsabs=1e-14, epsrel=1e-12)[0])
    return partition.entropy - math.fsum(cond)


@dataclass(frozen=True)
class InsiderValueRow:
    """Insider log value for one partition: MC against ``H(G^n)``."""

    n: int
    value: Estimate
    coarse: float
    entropy: float
    truncated: float

    @property
    def truncation(self) -> float:
        return self.entropy - self.truncated

    @property
    def grid_error(self) -> float:
        return abs(self.value.mean - self.coarse)

    @property
    def allowance(self) -> float:
        return self.truncation + self.grid_error

    @property
    def gap(self) -> float:
        return self.value.mean - self.entropy

    @property
    def passed(self) -> bool:
        return abs(self.gap) <= 3.0 * self.value.se + self.allowance

    def record(self) -> dict:
        return {"n": self.n, "value": self.value.mean, "se": self.value.se, "coarse": self.coarse,
                "entropy": self.entropy, "truncated": self.truncated, "truncation": self.truncation,
                "grid_error": self.grid_error, "allowance": self.allowance, "gap": self.gap, "pass": self.passed}


@dataclass(frozen=True)
class BrownianExperiment:
    market: BrownianMarket
    grid_kind: str
    n_steps: int
    delta: float
    n_paths: int
    seed: int
    rows: tuple[InsiderValueRow, ...]
    density_checks: tuple[tuple[float, Estimate], ...]
    check_cell: int
    values: np.ndarray = field(repr=False)

    def row(self, n: int) -> InsiderValueRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise KeyError(n)

    def slope(self) -> float:
        """Least-squares slope of the value against ``log n``."""
        x = np.log([r.n for r in self.rows])
        y = np.array([r.value.mean for r in self.rows])
        return float(np.polyfit(x, y, 1)[0])

    def paired_increment(self, i: int, j: int) -> Estimate:
        """``value[j] - value[i]`` on shared paths."""
        return mean_se(self.values[:, j] - self.values[:, i])


def bs_insider_experiment(market: BrownianMarket, partitions, n_paths: int, n_steps: int, seed: int,
                          delta: float | None = None, grid: str = "graded",
                          threads: int | None = None) -> BrownianExperiment:
    """Log-optimal insider value ``1/2 int_0^{T-delta} a_t^2 dt`` for one or more partitions of ``W_T``.

    ``partitions`` is a :class:`PartitionSpec`, an integer (equal-mass cells
    of the law of ``W_T``) or a sequence of either; all share the same
    Brownian paths.  ``a_t`` is the log-gradient in ``w`` of the conditional
    cell probability, in closed Gaussian form.  The density martingale check
    tracks the middle cell of the first partition.
    """
    if n_paths < 2:
        raise DomainError("need at least two paths")
    law = market.terminal_law()
    if isinstance(partitions, (int, PartitionSpec)):
        partitions = [partitions]
    parts = []
    for p in partitions:
        p = make_partition(law, int(p), "equal_mass") if isinstance(p, (int, np.integer)) else p
        parts.append(p.closed(law))
    tg = time_grid(market.horizon, n_steps, delta, grid)
    width = max(p.n for p in parts) + 1
    edges = np.full((len(parts), width), np.inf)
    for j, p in enumerate(parts):
        edges[j, : p.n + 1] = p.edges
    n_cells = np.array([p.n for p in parts], dtype=np.int64)
    check_cell = parts[0].n // 2
    check_idx = np.array([tg.nearest(f * market.horizon) for f in CHECK_FRACTIONS], dtype=np.int64)
    value = np.empty((n_paths, len(parts)))
    coarse = np.empty((n_paths, len(parts)))
    dens = np.empty((n_paths, len(check_idx)))
    s = u64(seed)
    run_chunked(lambda lo, hi: bs_kernel(s, 0, lo, hi, float(market.horizon), tg.times, tg.n_int, edges, n_cells,
                                         check_cell, check_idx, value, coarse, dens), n_paths, threads)
    rows = []
    for j, p in enumerate(parts):
        probs = cell_probabilities(law, p.edges)
        spec = PartitionSpec(p.edges, tuple(probs.tolist()), p.mode, math.fsum(probs.tolist()))
        rows.append(InsiderValueRow(p.n, mean_se(value[:, j]), float(mean_se(coarse[:, j]).mean), spec.entropy,
                                    truncated_entropy(spec, market.horizon, tg.delta)))
    checks = tuple((float(tg.times[k]), mean_se(dens[:, i])) for i, k in enumerate(check_idx))
    return BrownianExperiment(market, grid, n_steps, tg.delta, n_paths, seed, tuple(rows), checks, check_cell, value)
