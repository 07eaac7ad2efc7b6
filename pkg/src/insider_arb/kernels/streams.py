"""Deterministic per-path random streams.

Every simulated path owns one stream identified by ``(seed, index)``.  The
generator is SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom
number generators", OOPSLA 2014): the stream state is a 64-bit Weyl counter
advanced by the golden-ratio increment and each output is the SplitMix64
finalizer applied to the counter.  The starting counter of a stream is the
finalizer of ``finalize(seed) + index * K`` with an odd constant ``K``, so a
stream is a pure function of ``(seed, index)`` and never depends on which
worker draws it or in which order streams are consumed.

Two implementations share the algorithm bit for bit:

* :class:`SeededStream` is plain Python, convenient for single paths and tests;
* the ``_nb_*`` functions are numba kernels used inside ensemble loops.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INDEX_MULT = 0xD1B54A32D192ED03
TWO_M53 = 2.0 ** -53


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_start(seed: int, index: int) -> int:
    """Initial Weyl counter of stream ``(seed, index)``."""
    return _mix64((_mix64(seed & MASK64) + (index & MASK64) * INDEX_MULT) & MASK64)


class SeededStream:
    """Reproducible random stream for one path.

    Identical ``(seed, index)`` pairs always yield identical draw sequences.
    """

    __slots__ = ("seed", "index", "_state")

    def __init__(self, seed: int, index: int = 0):
        self.seed = int(seed)
        self.index = int(index)
        self._state = stream_start(self.seed, self.index)

    def __repr__(self) -> str:
        return f"SeededStream(seed={self.seed}, index={self.index})"

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        return _mix64(self._state)

    def uniform(self) -> float:
        """Uniform draw on the open interval (0, 1)."""
        return ((self.next_u64() >> 11) + 0.5) * TWO_M53

    def exponential(self, rate: float) -> float:
        if rate <= 0:
            raise ValueError("exponential rate must be positive")
        return -math.log(self.uniform()) / rate

    def normal(self) -> float:
        """Standard normal via the Box-Muller cosine branch (two uniforms)."""
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def poisson_jump_times(self, rate: float, horizon: float) -> list[float]:
        """Partial sums of i.i.d. Exp(rate) gaps that fall in (0, horizon]."""
        if horizon <= 0:
            raise ValueError("horizon must be positive")
        if rate < 0:
            raise ValueError("rate must be nonnegative")
        times: list[float] = []
        if rate == 0:
            return times
        t = 0.0
        while True:
            t += self.exponential(rate)
            if t > horizon:
                return times
            times.append(t)


def stream(seed: int, index: int = 0) -> SeededStream:
    return SeededStream(seed, index)


# --- numba twins -----------------------------------------------------------

_NB_GAMMA = np.uint64(GAMMA)
_NB_MIX1 = np.uint64(MIX1)
_NB_MIX2 = np.uint64(MIX2)
_NB_INDEX_MULT = np.uint64(INDEX_MULT)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)


@nb.njit(cache=True, nogil=True)
def _nb_mix64(z):
    z = (z ^ (z >> _S30)) * _NB_MIX1
    z = (z ^ (z >> _S27)) * _NB_MIX2
    return z ^ (z >> _S31)


@nb.njit(cache=True, nogil=True)
def _nb_start(seed, index):
    return _nb_mix64(_nb_mix64(np.uint64(seed)) + np.uint64(index) * _NB_INDEX_MULT)


@nb.njit(cache=True, nogil=True)
def _nb_uniform(state):
    """Return ``(new_state, u)`` with ``u`` uniform on (0, 1)."""
    state = state + _NB_GAMMA
    z = _nb_mix64(state)
    return state, (float(z >> _S11) + 0.5) * TWO_M53


@nb.njit(cache=True, nogil=True)
def _nb_exponential(state, rate):
    state, u = _nb_uniform(state)
    return state, -math.log(u) / rate


@nb.njit(cache=True, nogil=True)
def _nb_normal(state):
    state, u1 = _nb_uniform(state)
    state, u2 = _nb_uniform(state)
    return state, math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@nb.njit(cache=True, nogil=True)
def _nb_normal_pair(state):
    """Both Box-Muller outputs from one pair of uniforms."""
    state, u1 = _nb_uniform(state)
    state, u2 = _nb_uniform(state)
    r = math.sqrt(-2.0 * math.log(u1))
    return state, r * math.cos(2.0 * math.pi * u2), r * math.sin(2.0 * math.pi * u2)
