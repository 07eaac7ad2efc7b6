"""Ensemble evaluation of the insider functionals and the duality checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvergenceError
from ..kernels.distributions import SkellamParams, log_skellam_pmf, skellam_entropy
from ..kernels.parallel import run_chunked
from ..kernels.stats import Estimate, exact_sum, mean_se
from ..poisson_market.paths import PathEnsemble
from ..reporting import Check
from . import _kernels

DEFAULT_EPSILON = 1e-3
EPSILON_SWEEP = (1e-2, 1e-3, 1e-4)
COARSE_EPSILON = 0.2
QUAD_TOL = 1e-9


@dataclass
class PathFunctionals:
    """Per-path quantities along the insider intensity curves.

    entropy: int (l1 log l1 + l2 log l2 - l1 - l2 + 2) dt
    dual:    int (s log(s/(e+1)) - l1 + 2) dt with s = l1 + l2
    log_z:   log of the density (w.r.t. unit intensities) with alpha1 = s/(e+1), alpha2 = e alpha1
    log_wealth[:, k]: optimal-fraction log-wealth stopped at tau_eps for eps = epsilons[k]
    """

    horizon: float
    epsilons: tuple[float, ...]
    n_terminal: np.ndarray
    entropy: np.ndarray
    dual: np.ndarray
    compensator: np.ndarray
    jump_log: np.ndarray
    log_z: np.ndarray
    log_wealth: np.ndarray
    min_factor: np.ndarray
    converged: np.ndarray
    tol: float = QUAD_TOL
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.n_terminal.shape[0]

    def wealth(self, epsilon: float) -> np.ndarray:
        try:
            k = self.epsilons.index(epsilon)
        except ValueError:
            raise KeyError(f"epsilon {epsilon} not evaluated; have {self.epsilons}") from None
        return self.log_wealth[:, k]

    def require_converged(self, values: np.ndarray) -> None:
        bad = int((~self.converged).sum())
        if bad:
            raise ConvergenceError(f"quadrature missed tol={self.tol} on {bad} paths",
                                   best_estimate=mean_se(values).mean)


def path_functionals(ensemble: PathEnsemble, epsilons=(0.0, *EPSILON_SWEEP, COARSE_EPSILON),
                     tol: float = QUAD_TOL, threads: int | None = None) -> PathFunctionals:
    n = len(ensemble)
    eps = np.asarray(epsilons, dtype=float)
    outs = [np.empty(n) for _ in range(6)]
    logv = np.empty((n, eps.size))
    ok = np.empty(n, dtype=np.bool_)
    a, d, s, jl, lz, mf = outs
    run_chunked(lambda lo, hi: _kernels.path_functionals(ensemble.offsets, ensemble.times, ensemble.marks,
                                                         float(ensemble.horizon), eps, tol, lo, hi,
                                                         a, d, s, jl, lz, logv, mf, ok), n, threads)
    return PathFunctionals(float(ensemble.horizon), tuple(float(e) for e in eps), ensemble.n_terminal.copy(),
                           a, d, s, jl, lz, logv, mf, ok, tol)


def _as_functionals(obj, threads=None) -> PathFunctionals:
    return obj if isinstance(obj, PathFunctionals) else path_functionals(obj, threads=threads)


def dual_integral_estimate(ensemble, bucket: int | None = None, threads: int | None = None) -> Estimate:
    """MC estimate of ``E[int (s log(s/(e+1)) - l1 + 2) dt ; N_T = bucket]``.

    Without a bucket the indicator is dropped.  The estimate is a mean over
    all paths, so bucket estimates add up to the unbucketed one.
    """
    f = _as_functionals(ensemble, threads)
    values = f.dual if bucket is None else np.where(f.n_terminal == bucket, f.dual, 0.0)
    f.require_converged(values)
    return mean_se(values)


def dual_term(f: PathFunctionals) -> Estimate:
    """``D = -E[int ...]``, the term that is added to the entropy in the log-utility value."""
    est = dual_integral_estimate(f)
    return Estimate(-est.mean, est.se, est.n)


@dataclass(frozen=True)
class BucketRow:
    x: int
    estimate: Estimate
    target: float
    passed: bool


@dataclass
class EntropyIdentity:
    rows: list[BucketRow]
    aggregate: Estimate
    entropy: float
    skipped: list[int]
    notes: list[str]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and self.aggregate.within(self.entropy)

    def checks(self) -> list[Check]:
        out = [Check(f"entropy_bucket[x={r.x}]", r.estimate.mean, r.estimate.se, r.target, 3 * r.estimate.se,
                     note=f"n={r.estimate.n}") for r in self.rows]
        out.append(Check("entropy_aggregate", self.aggregate.mean, self.aggregate.se, self.entropy,
                         3 * self.aggregate.se))
        return out


def entropy_identity_check(ensemble, buckets=range(-2, 3), threads: int | None = None) -> EntropyIdentity:
    """Conditional means of the entropy integral against ``-log P[N_T = x]``."""
    f = _as_functionals(ensemble, threads)
    f.require_converged(f.entropy)
    T = f.horizon
    rows, skipped, notes = [], [], []
    for x in buckets:
        sel = f.entropy[f.n_terminal == x]
        if sel.size < 2:
            skipped.append(int(x))
            notes.append(f"bucket x={x} skipped: {sel.size} paths")
            continue
        est = mean_se(sel)
        target = -log_skellam_pmf(int(x), T, T)
        rows.append(BucketRow(int(x), est, target, est.within(target)))
    return EntropyIdentity(rows, mean_se(f.entropy), skellam_entropy(SkellamParams(T, T)), skipped, notes)


@dataclass(frozen=True)
class UtilityRow:
    epsilon: float
    log_utility: Estimate
    target: float
    gap: float
    se_gap: float
    passed: bool
    kind: str = "duality"

    def check(self) -> Check:
        if self.kind == "suboptimal":
            return Check(f"log_utility_suboptimal[eps={self.epsilon:g}]", self.log_utility.mean, self.se_gap,
                         self.target, 3 * self.se_gap, rule="lt")
        if self.kind == "weak":
            return Check(f"log_utility_weak_duality[eps={self.epsilon:g}]", self.log_utility.mean, self.se_gap,
                         self.target, 3 * self.se_gap, rule="le")
        return Check(f"log_utility_gap[eps={self.epsilon:g}]", self.log_utility.mean, self.se_gap,
                     self.target, 3 * self.se_gap)


@dataclass
class LogUtilityReport:
    horizon: float
    n_paths: int
    entropy: float
    dual: Estimate
    rows: list[UtilityRow]
    admissible: bool
    min_factor: float

    @property
    def value(self) -> float:
        return self.entropy + self.dual.mean

    def row(self, epsilon: float) -> UtilityRow:
        return next(r for r in self.rows if r.epsilon == epsilon)

    def checks(self) -> list[Check]:
        out = [r.check() for r in self.rows]
        out.append(Check("zero_strategy_below_value", 0.0, 0.0, self.value, 0.0, rule="lt"))
        out.append(Check.flag("admissible_factors", self.admissible, note=f"min factor {self.min_factor:.6g}"))
        return out


def insider_log_utility_report(ensemble, epsilon: float = DEFAULT_EPSILON, sweep=EPSILON_SWEEP,
                               coarse: float | None = COARSE_EPSILON,
                               threads: int | None = None) -> LogUtilityReport:
    """Compare the insider's MC log-utility with ``H(N_T) + D`` on one ensemble.

    The gap is estimated from per-path differences ``log V + dual``, which
    share the path randomness and therefore have a much smaller SE than the
    two means separately.  The main ``epsilon`` row must match the value within
    3 SE, the sweep rows must respect weak duality, and the coarse row must
    fall below the value by more than 3 SE.
    """
    eps_list = [epsilon] + [e for e in sweep if e != epsilon]
    wanted = tuple(dict.fromkeys(eps_list + ([coarse] if coarse is not None else [])))
    f = ensemble if isinstance(ensemble, PathFunctionals) and set(wanted) <= set(ensemble.epsilons) \
        else path_functionals(ensemble, epsilons=wanted, threads=threads)
    f.require_converged(f.dual)
    T = f.horizon
    H = skellam_entropy(SkellamParams(T, T))
    D = dual_term(f)
    rows = []
    for e in wanted:
        lv = f.wealth(e)
        gap = mean_se(lv + f.dual)
        # mean(log V + dual) - H = E[log V] - (H + D)
        g = gap.mean - H
        if e == epsilon:
            kind, passed = "duality", abs(g) <= 3 * gap.se
        elif e == coarse:
            kind, passed = "suboptimal", g < -3 * gap.se
        else:
            kind, passed = "weak", g <= 3 * gap.se
        rows.append(UtilityRow(e, mean_se(lv), H + D.mean, g, gap.se, passed, kind))
    mf = float(f.min_factor.min()) if len(f) else math.inf
    return LogUtilityReport(T, len(f), H, D, rows, bool(mf > 0), mf)


def admissibility_check(f: PathFunctionals) -> Check:
    mf = float(f.min_factor.min())
    return Check.flag("min_wealth_factor_positive", mf > 0, note=f"min factor {mf:.6g}")


def bucket_partition_residual(f: PathFunctionals, buckets) -> float:
    """|sum of bucket estimates - unbucketed estimate| over the given buckets plus the rest."""
    total = dual_integral_estimate(f).mean
    xs = sorted(set(int(b) for b in buckets))
    parts = [dual_integral_estimate(f, x).mean for x in xs]
    rest = np.where(np.isin(f.n_terminal, xs), 0.0, f.dual)
    parts.append(exact_sum(rest) / len(f))
    return abs(math.fsum(parts) - total)


@dataclass(frozen=True)
class CompensatorRow:
    driver: int
    bucket: int | None
    increment: Estimate


def compensator_check(ensemble: PathEnsemble, t1: float, t2: float, buckets=(), tol: float = QUAD_TOL,
                      threads: int | None = None) -> list[CompensatorRow]:
    """Means of ``N^i_{t2} - N^i_{t1} - int_{t1}^{t2} lambda^i dt``, overall and on ``{N_T = x}``.

    Both compensated increments are martingale increments in the insider
    filtration and ``N_T`` is known at time 0, so every mean is zero.
    """
    if not 0.0 <= t1 < t2 <= ensemble.horizon:
        raise ValueError("need 0 <= t1 < t2 <= horizon")
    n = len(ensemble)
    l1, l2 = np.empty(n), np.empty(n)
    dn1, dn2 = np.empty(n, dtype=np.int64), np.empty(n, dtype=np.int64)
    ok = np.empty(n, dtype=np.bool_)
    run_chunked(lambda lo, hi: _kernels.intensity_integrals(ensemble.offsets, ensemble.times, ensemble.marks,
                                                            float(ensemble.horizon), float(t1), float(t2), tol,
                                                            lo, hi, l1, l2, dn1, dn2, ok), n, threads)
    if not ok.all():
        raise ConvergenceError(f"intensity quadrature missed tol={tol} on {int((~ok).sum())} paths")
    rows = []
    x = ensemble.n_terminal
    for driver, m in ((1, dn1 - l1), (2, dn2 - l2)):
        rows.append(CompensatorRow(driver, None, mean_se(m)))
        for b in buckets:
            rows.append(CompensatorRow(driver, int(b), mean_se(np.where(x == b, m, 0.0))))
    return rows
