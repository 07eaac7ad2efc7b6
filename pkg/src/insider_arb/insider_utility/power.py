"""Power-utility dual values for parametrised martingale densities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..kernels.parallel import run_chunked
from ..kernels.stats import Estimate, mean_se
from ..poisson_market.paths import PathEnsemble
from ..poisson_market.simulate import TiltControls
from . import _kernels

E = math.e


@dataclass(frozen=True)
class ConstantIntensities:
    """Raw constant intensities ``(alpha1, alpha2)``; a martingale density needs ``alpha2 = e alpha1``."""

    alpha1: float
    alpha2: float

    @property
    def feasible(self) -> bool:
        return self.alpha1 > 0 and math.isclose(self.alpha2, E * self.alpha1, rel_tol=1e-12)


@dataclass(frozen=True)
class PowerDualResult:
    gamma: float
    bucket: int
    value: float
    se: float
    moment: Estimate | None
    feasible: bool
    label: str = ""


def density_log(ensemble: PathEnsemble, controls: TiltControls, threads: int | None = None) -> np.ndarray:
    """``log Z_T`` of the tilted measure along each path of a unit-intensity ensemble."""
    n = len(ensemble)
    out = np.empty(n)
    has_level = controls.level is not None
    level = int(controls.level) if has_level else 0
    run_chunked(lambda lo, hi: _kernels.control_log_density(ensemble.offsets, ensemble.marks, ensemble.times,
                                                            float(ensemble.horizon), float(controls.high),
                                                            float(controls.low), level, has_level, lo, hi, out),
                n, threads)
    return out


def power_dual_value(gamma: float, controls, bucket: int, ensemble: PathEnsemble,
                     threads: int | None = None) -> PowerDualResult:
    """``E[Z_T^{-gamma/(1-gamma)} ; N_T = bucket]^{1-gamma}`` for the density given by ``controls``.

    ``controls`` is a :class:`TiltControls` or a :class:`ConstantIntensities`;
    the latter is rejected as infeasible unless ``alpha2 = e alpha1``.  The SE
    of the power is obtained by the delta method.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError("gamma must lie in (0, 1)")
    if isinstance(controls, ConstantIntensities):
        if not controls.feasible:
            return PowerDualResult(gamma, bucket, math.nan, math.nan, None, False,
                                   f"alpha=({controls.alpha1:g}, {controls.alpha2:g}) infeasible")
        controls = TiltControls.constant(controls.alpha1)
    q = gamma / (1.0 - gamma)
    logz = density_log(ensemble, controls, threads)
    vals = np.where(ensemble.n_terminal == bucket, np.exp(-q * logz), 0.0)
    m = mean_se(vals)
    value = m.mean ** (1.0 - gamma) if m.mean > 0 else 0.0
    se = (1.0 - gamma) * m.mean ** (-gamma) * m.se if m.mean > 0 else math.nan
    return PowerDualResult(gamma, bucket, value, se, m, True, _label(controls))


def _label(c: TiltControls) -> str:
    if c.level is None:
        return f"constant({c.high:g})"
    return f"switch({c.high:g}->{c.low:g}@{c.level})"


def power_dual_inf(gamma: float, candidates, bucket: int, ensemble: PathEnsemble,
                   threads: int | None = None) -> tuple[PowerDualResult, list[PowerDualResult]]:
    """Evaluate each candidate and keep the smallest feasible value (the running inf)."""
    results = [power_dual_value(gamma, c, bucket, ensemble, threads) for c in candidates]
    feasible = [r for r in results if r.feasible]
    if not feasible:
        raise DomainError("no feasible candidate density")
    best = feasible[0]
    for r in feasible[1:]:
        if r.value < best.value:
            best = r
    return best, results


def dual_rate(alpha1: float, lambda1: float, lambda2: float) -> float:
    """Rate of ``E[log Z]`` under the insider intensities for ``alpha2 = e alpha1``.

    ``l1 log a + l2 (1 + log a) - (1 + e) a + 2``; concave in ``a`` with its
    maximum at ``a = (l1 + l2) / (1 + e)``.
    """
    if alpha1 <= 0:
        raise DomainError("alpha1 must be positive")
    return lambda1 * math.log(alpha1) + lambda2 * (1.0 + math.log(alpha1)) - (1.0 + E) * alpha1 + 2.0


def concavity_certificate(triples) -> tuple[int, float]:
    """Count midpoint-concavity violations of :func:`dual_rate` in ``alpha1``.

    ``triples`` holds ``(a, b, lambda1, lambda2)``.  Returns the number of
    violations beyond rounding and the smallest slack seen.
    """
    bad, worst = 0, math.inf
    for a, b, l1, l2 in triples:
        mid = dual_rate(0.5 * (a + b), l1, l2)
        avg = 0.5 * (dual_rate(a, l1, l2) + dual_rate(b, l1, l2))
        slack = mid - avg
        scale = 1e-12 * (1.0 + abs(mid) + abs(avg))
        if slack < -scale:
            bad += 1
        worst = min(worst, slack)
    return bad, worst
