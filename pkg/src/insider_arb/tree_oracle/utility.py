"""Log utility on trees: myopic primal DP and per-node KL dual."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ..errors import ConvergenceError
from .tree import MarketTree

NEWTON_TOL = 1e-13
NEWTON_MAXITER = 200


@dataclass(frozen=True)
class LogUtilityResult:
    """Value of ``sup E[log V_T]`` from ``V_0 = 1``; ``unbounded`` replaces +inf."""

    value: float | None
    unbounded: bool
    fractions: dict[int, float]
    witness_node: int | None = None

    def record(self) -> dict:
        return {"value": self.value, "unbounded": self.unbounded, "witness_node": self.witness_node}


def _growth(weights, rets, pi: float) -> float:
    return math.fsum(w * math.log1p(pi * r) for w, r in zip(weights, rets) if w > 0)


def optimal_step(weights, rets) -> tuple[float, float] | None:
    """Maximise ``sum w_c log(1 + pi r_c)`` over admissible ``pi``.

    Only children with positive weight constrain ``pi``.  Returns
    ``(pi, value)`` or ``None`` when the supremum is infinite (no one-step NA
    on the weighted children).
    """
    pairs = [(w, r) for w, r in zip(weights, rets) if w > 0]
    if not pairs or all(r == 0 for _, r in pairs):
        return 0.0, 0.0
    rs = [r for _, r in pairs]
    if not (min(rs) < 0 < max(rs)):
        return None
    lo = max(-1.0 / r for r in rs if r > 0)
    hi = min(-1.0 / r for r in rs if r < 0)

    def slope(pi):
        return math.fsum(w * r / (1.0 + pi * r) for w, r in pairs)

    # slope -> +inf at lo and -inf at hi; shrink towards the poles until bracketed
    width = hi - lo
    a, b = lo + 1e-3 * width, hi - 1e-3 * width
    for _ in range(60):
        if slope(a) > 0:
            break
        a = lo + (a - lo) * 1e-2
    for _ in range(60):
        if slope(b) < 0:
            break
        b = hi - (hi - b) * 1e-2
    pi = brentq(slope, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return pi, _growth([w for w, _ in pairs], rs, pi)


def log_utility_primal(tree: MarketTree) -> LogUtilityResult:
    """Backward DP ``V(node) = max_pi sum p_c log(1 + pi r_c) + sum p_c V(c)``."""
    v = [0.0] * len(tree)
    fractions: dict[int, float] = {}
    for i in tree.postorder():
        kids = tree.children[i]
        if not kids:
            continue
        step = optimal_step(tree.probs[i], tree.returns(i))
        if step is None:
            return LogUtilityResult(None, True, fractions, i)
        fractions[i] = step[0]
        v[i] = step[1] + math.fsum(p * v[c] for p, c in zip(tree.probs[i], kids))
    return LogUtilityResult(v[0], False, fractions)


def kl_projection(p, r, tol: float = NEWTON_TOL, maxiter: int = NEWTON_MAXITER, node: int = -1):
    """Minimise ``KL(p || q)`` subject to ``sum q = 1`` and ``sum q r = 0``.

    The minimiser has the form ``q_c = p_c / (a + b r_c)``.  ``(a, b)`` solve
    the two constraint equations by damped Newton; steps are halved until all
    denominators stay positive and the residual decreases.  Returns
    ``(q, kl)``.
    """
    p = np.asarray(p, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.all(r == 0):
        return p.copy(), 0.0

    def resid(a, b):
        w = a + b * r
        return np.array([np.sum(p / w) - 1.0, np.sum(p * r / w)]), w

    a, b = 1.0, 0.0
    f, w = resid(a, b)
    for _ in range(maxiter):
        norm = np.max(np.abs(f))
        if norm <= tol:
            q = p / w
            return q, float(math.fsum((p * np.log(w)).tolist()))
        w2 = w * w
        j = -np.array([[np.sum(p / w2), np.sum(p * r / w2)],
                       [np.sum(p * r / w2), np.sum(p * r * r / w2)]])
        try:
            da, db = np.linalg.solve(j, -f)
        except np.linalg.LinAlgError:
            break
        step = 1.0
        for _ in range(60):
            na, nb = a + step * da, b + step * db
            if np.all(na + nb * r > 0):
                nf, nw = resid(na, nb)
                if np.max(np.abs(nf)) < norm or step < 1e-12:
                    break
            step *= 0.5
        else:
            break
        a, b, f, w = na, nb, nf, nw
    raise ConvergenceError(f"KL Newton did not converge at node {node}", error_estimate=float(np.max(np.abs(f))))


@dataclass(frozen=True)
class KLDualResult:
    value: float | None
    unbounded: bool
    node_kl: dict[int, float]
    measures: dict[int, np.ndarray]
    witness_node: int | None = None


def log_utility_dual(tree: MarketTree) -> KLDualResult:
    """``inf_Q E_P[log dP/dQ]`` as the reach-weighted sum of per-node KL projections."""
    reach = tree.reach_probabilities()
    node_kl: dict[int, float] = {}
    measures: dict[int, np.ndarray] = {}
    terms = []
    for i in range(len(tree)):
        if tree.is_leaf(i):
            continue
        r = tree.returns(i)
        if not (min(r) < 0 < max(r)) and any(x != 0 for x in r):
            return KLDualResult(None, True, node_kl, measures, i)
        q, kl = kl_projection(tree.probs[i], r, node=i)
        node_kl[i], measures[i] = kl, q
        terms.append(reach[i] * kl)
    return KLDualResult(math.fsum(terms), False, node_kl, measures)
