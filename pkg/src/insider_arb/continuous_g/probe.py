"""Exploratory grid probe of the interval criterion for NUPBR of the insider.

For each interval ``(a, a + eps]`` the probe compares the best
``E[1{G in cell} log Z_T]`` found in a finite family of martingale
densities with ``-P log P - C P``.  A finite family can only give evidence;
it never certifies the supremum over all martingale densities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from ..errors import DomainError
from ..kernels.stats import mean_se

EXPLORATORY = "exploratory: finite density family on a finite interval grid, not a proof"


@dataclass(frozen=True)
class ProbeRow:
    a: float
    eps: float
    prob: float
    lhs: float
    lhs_se: float
    best: str
    rhs: float
    holds: bool
    implied_c: float
    skipped: bool = False

    def record(self) -> dict:
        return {"a": self.a, "eps": self.eps, "prob": self.prob, "lhs": self.lhs, "lhs_se": self.lhs_se,
                "best": self.best, "rhs": self.rhs, "holds": self.holds, "implied_c": self.implied_c,
                "skipped": self.skipped}


@dataclass(frozen=True)
class ProbeResult:
    constant: float
    rows: tuple[ProbeRow, ...]
    note: str = EXPLORATORY

    @property
    def active(self) -> list[ProbeRow]:
        return [r for r in self.rows if not r.skipped]

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.active)

    @property
    def implied_constant(self) -> float:
        """Smallest ``C`` for which every active row holds (MC point estimates)."""
        act = self.active
        return max(r.implied_c for r in act) if act else -math.inf


def nupbr_criterion_probe(signal, log_densities: Mapping[str, object], intervals, constant: float,
                          probability: Callable[[float, float], float] | None = None) -> ProbeResult:
    """Tabulate ``sup_family E[1{G in (a, a+eps]} log Z_T]`` against ``-P log P - C P``.

    ``signal`` holds ``G`` per path and ``log_densities`` maps a label to
    ``log Z_T`` per path (or a constant).  ``P`` comes from ``probability``
    when given, otherwise from the sample.  A row holds when the best LHS is
    within ``3 SE`` of reaching the RHS; rows with ``P = 0`` are skipped.
    """
    g = np.asarray(signal, dtype=float)
    if not log_densities:
        raise DomainError("the density family is empty")
    fam = {k: np.broadcast_to(np.asarray(v, dtype=float), g.shape) for k, v in log_densities.items()}
    rows = []
    for a, eps in intervals:
        a, eps = float(a), float(eps)
        inside = (g > a) & (g <= a + eps)
        p = float(probability(a, a + eps)) if probability is not None else float(np.count_nonzero(inside)) / g.size
        if not p > 0:
            rows.append(ProbeRow(a, eps, 0.0, math.nan, math.nan, "", math.nan, True, math.nan, True))
            continue
        best, est = None, None
        for label in sorted(fam):
            m = mean_se(np.where(inside, fam[label], 0.0))
            if est is None or m.mean > est.mean:
                best, est = label, m
        rhs = -p * math.log(p) - constant * p
        implied = -math.log(p) - est.mean / p
        rows.append(ProbeRow(a, eps, p, est.mean, est.se, best, rhs, bool(est.mean + 3.0 * est.se >= rhs), implied))
    return ProbeResult(float(constant), tuple(rows))


def interval_grid(centres, widths, centred: bool = True) -> list[tuple[float, float]]:
    """``(a, eps)`` pairs; with ``centred`` the cell ``(c - eps/2, c + eps/2]`` surrounds each centre."""
    return [(float(c) - (w / 2 if centred else 0.0), float(w)) for w in widths for c in centres]
