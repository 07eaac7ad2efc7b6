from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, InvariantError


@dataclass(frozen=True)
class MarketParams:
    """Two independent Poisson drivers on ``[0, horizon]``; ``S = exp(N1 - N2)``."""

    horizon: float = 1.0
    intensity1: float = 1.0
    intensity2: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise DomainError("horizon must be positive")
        # zero intensities are allowed for degenerate test markets
        if self.intensity1 < 0 or self.intensity2 < 0:
            raise DomainError("intensities must be nonnegative")


def _check_times(times, horizon, name):
    prev = 0.0
    for t in times:
        if not (prev < t <= horizon):
            raise InvariantError(f"{name} must be strictly increasing in (0, T]")
        prev = t


@dataclass(frozen=True)
class JumpPath:
    jumps1: tuple[float, ...]
    jumps2: tuple[float, ...]
    horizon: float

    def __post_init__(self):
        object.__setattr__(self, "jumps1", tuple(float(t) for t in self.jumps1))
        object.__setattr__(self, "jumps2", tuple(float(t) for t in self.jumps2))
        _check_times(self.jumps1, self.horizon, "jumps1")
        _check_times(self.jumps2, self.horizon, "jumps2")

    def counts(self, t: float) -> tuple[int, int]:
        """Right-continuous counts: a jump exactly at ``t`` is included."""
        return bisect_right(self.jumps1, t), bisect_right(self.jumps2, t)

    @property
    def n_terminal(self) -> int:
        return len(self.jumps1) - len(self.jumps2)

    def merged(self) -> tuple[np.ndarray, np.ndarray]:
        """Jump times in increasing order with marks +1 (N1) and -1 (N2)."""
        times = np.array(self.jumps1 + self.jumps2, dtype=float)
        marks = np.array([1] * len(self.jumps1) + [-1] * len(self.jumps2), dtype=np.int8)
        order = np.argsort(times, kind="stable")
        return times[order], marks[order]

    def to_text(self) -> str:
        """Line format ``T; t1_1,t1_2,...; t2_1,...`` with round-trip float reprs."""
        return "{}; {}; {}".format(repr(self.horizon), ",".join(map(repr, self.jumps1)),
                                   ",".join(map(repr, self.jumps2)))

    @classmethod
    def from_text(cls, line: str) -> "JumpPath":
        parts = [p.strip() for p in line.strip().split(";")]
        if len(parts) != 3:
            raise ValueError(f"expected 'T; jumps1; jumps2', got {line!r}")

        def parse(s):
            return tuple(float(v) for v in s.split(",") if v.strip())

        return cls(parse(parts[1]), parse(parts[2]), float(parts[0]))


def state(path: JumpPath, t: float) -> tuple[int, int, int, float]:
    """``(N1_t, N2_t, N_t, S_t)`` with càdlàg counts."""
    if not (0.0 <= t <= path.horizon):
        raise DomainError(f"t={t} outside [0, {path.horizon}]")
    n1, n2 = path.counts(t)
    n = n1 - n2
    return n1, n2, n, math.exp(n)


@dataclass
class PathEnsemble:
    """Many paths in compressed form: path ``i`` owns ``times[offsets[i]:offsets[i+1]]``."""

    horizon: float
    offsets: np.ndarray
    times: np.ndarray
    marks: np.ndarray
    seed: int = 0
    first_index: int = 0
    n1: np.ndarray = field(init=False)
    n2: np.ndarray = field(init=False)

    def __post_init__(self):
        idx = np.repeat(np.arange(len(self.offsets) - 1), np.diff(self.offsets))
        self.n1 = np.bincount(idx[self.marks > 0], minlength=len(self)).astype(np.int64)
        self.n2 = np.bincount(idx[self.marks < 0], minlength=len(self)).astype(np.int64)

    def __len__(self) -> int:
        return len(self.offsets) - 1

    @classmethod
    def from_paths(cls, paths: list[JumpPath]) -> "PathEnsemble":
        if not paths:
            raise ValueError("need at least one path")
        horizon = paths[0].horizon
        if any(p.horizon != horizon for p in paths):
            raise ValueError("paths must share a horizon")
        offsets = np.zeros(len(paths) + 1, dtype=np.int64)
        times, marks = [], []
        for i, p in enumerate(paths):
            t, m = p.merged()
            times.append(t)
            marks.append(m)
            offsets[i + 1] = offsets[i] + len(t)
        return cls(horizon, offsets, np.concatenate(times).astype(float),
                   np.concatenate(marks).astype(np.int8))

    @property
    def n_terminal(self) -> np.ndarray:
        return self.n1 - self.n2

    def path(self, i: int) -> JumpPath:
        lo, hi = self.offsets[i], self.offsets[i + 1]
        t, m = self.times[lo:hi], self.marks[lo:hi]
        return JumpPath(tuple(t[m > 0]), tuple(t[m < 0]), self.horizon)

    def counts_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised right-continuous ``(N1_t, N2_t)`` for every path."""
        idx = np.repeat(np.arange(len(self)), np.diff(self.offsets))
        keep = self.times <= t
        n1 = np.bincount(idx[keep & (self.marks > 0)], minlength=len(self))
        n2 = np.bincount(idx[keep & (self.marks < 0)], minlength=len(self))
        return n1.astype(np.int64), n2.astype(np.int64)
