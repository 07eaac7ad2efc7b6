"""Superhedging on trees: backward min-max recursion and its martingale-measure dual."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..errors import BudgetError, DomainError
from .tree import MarketTree

ENUM_BUDGET = 8


def leaf_claim(tree: MarketTree, claim) -> dict[int, float]:
    """Leaf payoffs from a sequence (leaf order), a dict keyed by G-label, or a callable of the leaf id."""
    leaves = tree.leaves
    if callable(claim):
        vals = {i: float(claim(i)) for i in leaves}
    elif isinstance(claim, dict):
        vals = {i: float(claim.get(tree.label[i], 0.0)) for i in leaves}
    else:
        claim = list(claim)
        if len(claim) != len(leaves):
            raise DomainError(f"claim has {len(claim)} values for {len(leaves)} leaves")
        vals = {i: float(v) for i, v in zip(leaves, claim)}
    if any(not (v >= 0 and math.isfinite(v)) for v in vals.values()):
        raise DomainError("claim must be finite and nonnegative")
    return vals


@dataclass(frozen=True)
class SuperhedgeResult:
    price: float
    values: tuple[float, ...]
    hedge: dict[int, float]

    def superreplicates(self, tree: MarketTree, tol: float = 1e-12) -> bool:
        """Wealth ``v + h (S_c - S)`` dominates the child value on every branch."""
        for i, h in self.hedge.items():
            for c, d in zip(tree.children[i], tree.moves(i)):
                if self.values[i] + h * d < self.values[c] - tol * (1.0 + abs(self.values[c])):
                    return False
        return True


def _min_max_lines(values: Sequence[float], moves: Sequence[float]) -> tuple[float, float]:
    """``min_h max_c (v_c - h d_c)`` clamped at 0, with a minimising ``h``.

    The objective is convex and piecewise linear, so when the moves take both
    signs its minimum sits where an up-line meets a down-line.  Without moves
    of both signs the infimum is approached as ``|h| -> inf`` and the
    nonnegative-wealth constraint caps the price at 0 from below.
    """
    ups = [k for k, d in enumerate(moves) if d > 0]
    downs = [k for k, d in enumerate(moves) if d < 0]
    flat = [values[k] for k, d in enumerate(moves) if d == 0]
    if not ups or not downs:
        floor = max(flat) if flat else -math.inf
        h = 0.0 if not ups and not downs else (math.inf if ups else -math.inf)
        return max(floor, 0.0), h
    best, best_h = math.inf, 0.0
    for i in ups:
        for j in downs:
            h = (values[i] - values[j]) / (moves[i] - moves[j])
            v = max(values[k] - h * moves[k] for k in range(len(moves)))
            if v < best:
                best, best_h = v, h
    return max(best, 0.0), best_h


def superhedge_tree(tree: MarketTree, claim) -> SuperhedgeResult:
    payoff = leaf_claim(tree, claim)
    v = [0.0] * len(tree)
    hedge: dict[int, float] = {}
    for i in tree.postorder():
        if tree.is_leaf(i):
            v[i] = payoff[i]
            continue
        v[i], hedge[i] = _min_max_lines([v[c] for c in tree.children[i]], tree.moves(i))
    return SuperhedgeResult(v[0], tuple(v), hedge)


def one_step_vertices(moves: Sequence[float]) -> list[dict[int, float]]:
    """Vertices of ``{q >= 0 : sum q = 1, sum q d = 0}``: one flat child or an up/down pair."""
    out = [{k: 1.0} for k, d in enumerate(moves) if d == 0]
    for i, di in enumerate(moves):
        if di <= 0:
            continue
        for j, dj in enumerate(moves):
            if dj >= 0:
                continue
            qi = -dj / (di - dj)
            out.append({i: qi, j: 1.0 - qi})
    return out


@dataclass(frozen=True)
class EmmResult:
    value: float
    feasible: bool
    vertices_checked: int


def sup_over_emm(tree: MarketTree, claim, budget: int = ENUM_BUDGET) -> EmmResult:
    """``sup_Q E_Q[claim]`` over martingale measures by exhaustive vertex enumeration per node."""
    payoff = leaf_claim(tree, claim)
    v = [0.0] * len(tree)
    feasible = True
    count = 0
    for i in tree.postorder():
        kids = tree.children[i]
        if not kids:
            v[i] = payoff[i]
            continue
        if len(kids) > budget:
            raise BudgetError(f"node {i} has {len(kids)} children > budget {budget}")
        verts = one_step_vertices(tree.moves(i))
        count += len(verts)
        if not verts:
            feasible = False
            v[i] = 0.0
            continue
        v[i] = max(math.fsum(q * v[kids[k]] for k, q in vert.items()) for vert in verts)
    return EmmResult(v[0], feasible, count)


def one_step_na(tree: MarketTree, i: int) -> bool:
    """No arbitrage at node ``i``: moves of both signs, or all moves zero."""
    d = tree.moves(i)
    return (min(d) < 0 < max(d)) or all(x == 0 for x in d)


def is_complete(tree: MarketTree) -> bool:
    for i in range(len(tree)):
        kids = tree.children[i]
        if not kids:
            continue
        if len(kids) == 1:
            if tree.moves(i)[0] != 0:
                return False
        elif len(kids) != 2 or not one_step_na(tree, i) or 0 in tree.moves(i):
            return False
    return True


def emm_leaf_masses(tree: MarketTree) -> dict[int, float]:
    """Leaf probabilities of the unique martingale measure of a complete tree."""
    if not is_complete(tree):
        raise DomainError("tree is not complete")
    q = [0.0] * len(tree)
    q[0] = 1.0
    for i in range(len(tree)):
        kids = tree.children[i]
        if len(kids) == 1:
            q[kids[0]] = q[i]
        elif len(kids) == 2:
            vert = one_step_vertices(tree.moves(i))[0]
            for k, w in vert.items():
                q[kids[k]] = q[i] * w
    return {i: q[i] for i in tree.leaves}
