"""Insider views of a tree: conditioning on the terminal label, NUPBR witnesses, cost decay."""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError
from .superhedge import emm_leaf_masses, is_complete, superhedge_tree
from .tree import MarketTree, binomial
from .utility import LogUtilityResult, log_utility_primal, optimal_step


def label_mass(tree: MarketTree, g: int) -> list[float]:
    """``m(node) = P[G = g | node]`` by backward recursion."""
    m = [0.0] * len(tree)
    for i in tree.postorder():
        if tree.is_leaf(i):
            m[i] = 1.0 if tree.label[i] == g else 0.0
        else:
            m[i] = math.fsum(p * m[c] for p, c in zip(tree.probs[i], tree.children[i]))
    return m


@dataclass(frozen=True)
class ConditionedTree:
    """``P[. | G = g]`` on the tree: surviving branches reweighted by ``m(child) / m(node)``."""

    original: MarketTree
    g: int
    mass: tuple[float, ...]
    probs: tuple[tuple[float, ...], ...]

    @property
    def probability(self) -> float:
        return self.mass[0]

    def pruned(self, i: int) -> bool:
        return self.mass[i] == 0.0

    def as_tree(self) -> MarketTree:
        """Market tree on the surviving nodes only (pruned branches removed)."""
        t = self.original

        def build(i):
            if t.is_leaf(i):
                return {"price": t.price[i], "label": t.label[i]}
            kids = [(q, c) for q, c in zip(self.probs[i], t.children[i]) if q > 0]
            total = math.fsum(q for q, _ in kids)
            return {"price": t.price[i], "children": [{"p": q / total, "node": build(c)} for q, c in kids]}

        return MarketTree.from_nested(build(0))


def condition_tree(tree: MarketTree, g: int) -> ConditionedTree:
    m = label_mass(tree, g)
    if m[0] <= 0.0:
        raise DomainError(f"P[G = {g}] = 0")
    probs = []
    for i in range(len(tree)):
        if tree.is_leaf(i) or m[i] == 0.0:
            probs.append(tuple(0.0 for _ in tree.children[i]))
        else:
            probs.append(tuple(p * m[c] / m[i] for p, c in zip(tree.probs[i], tree.children[i])))
    return ConditionedTree(tree, g, tuple(m), tuple(probs))


@dataclass(frozen=True)
class Witness:
    """On ``{G = g}`` at ``node`` the surviving moves all have sign ``direction``.

    Holding ``n * direction`` shares over that step costs nothing, never loses
    and gains at least ``n * gain``, so ``P(W_n > c) >= probability`` for every
    ``c < n * gain``.
    """

    node: int
    g: int
    direction: int
    gain: float
    probability: float

    def threshold(self, n: float) -> float:
        return n * self.gain

    def tail_lower_bound(self, n: float, c: float) -> float:
        return self.probability if c < n * self.gain else 0.0


def _rank(w: Witness):
    return w.node, -w.probability, -w.gain


def nupbr_witness(tree: MarketTree) -> Witness | None:
    """Search for a one-step sure gain in some conditioned tree.

    Prefers the node closest to the root, then the most likely label, then
    the largest gain.
    """
    reach = tree.reach_probabilities()
    best = None
    for g in tree.labels:
        ct = condition_tree(tree, g)
        for i in range(len(tree)):
            if tree.is_leaf(i) or ct.pruned(i):
                continue
            d = [x for x, q in zip(tree.moves(i), ct.probs[i]) if q > 0]
            if all(x > 0 for x in d):
                w = Witness(i, g, 1, min(d), float(reach[i] * ct.mass[i]))
            elif all(x < 0 for x in d):
                w = Witness(i, g, -1, min(-x for x in d), float(reach[i] * ct.mass[i]))
            else:
                continue
            if best is None or _rank(w) < _rank(best):
                best = w
            break
    return best


@dataclass(frozen=True)
class Decomposition:
    lhs: float | None
    rhs: float | None
    unbounded_lhs: bool
    unbounded_rhs: bool
    per_label: dict[int, tuple[float | None, float | None]]

    @property
    def consistent(self) -> bool:
        if self.unbounded_lhs or self.unbounded_rhs:
            return self.unbounded_lhs == self.unbounded_rhs
        return abs(self.lhs - self.rhs) <= 1e-8


def _weighted_dp(tree: MarketTree, m: list[float]) -> float | None:
    """``sup_F E[log V_T ; G = g]`` with one-step weights ``p_c m(c)``."""
    u = [0.0] * len(tree)
    for i in tree.postorder():
        if tree.is_leaf(i) or m[i] == 0.0:
            continue
        w = [p * m[c] for p, c in zip(tree.probs[i], tree.children[i])]
        step = optimal_step(w, tree.returns(i))
        if step is None:
            return None
        u[i] = step[1] + math.fsum(p * u[c] for p, c in zip(tree.probs[i], tree.children[i]))
    return u[0]


def label_decomposition(tree: MarketTree) -> Decomposition:
    """Insider log value versus the sum of label-restricted public problems.

    Left: ``sum_g P[G=g] * (log value on the conditioned tree)``.  Right:
    ``sum_g sup_F E[log V_T 1{G=g}]`` from a DP with weights ``p_c m(c)``.
    A conditioned step without NA makes a side unbounded.
    """
    per = {}
    lhs_terms, rhs_terms = [], []
    ul = ur = False
    for g, pg in tree.label_probabilities().items():
        res: LogUtilityResult = log_utility_primal(condition_tree(tree, g).as_tree())
        left = None if res.unbounded else pg * res.value
        right = _weighted_dp(tree, label_mass(tree, g))
        per[g] = (left, right)
        ul |= left is None
        ur |= right is None
        if left is not None:
            lhs_terms.append(left)
        if right is not None:
            rhs_terms.append(right)
    return Decomposition(None if ul else math.fsum(lhs_terms), None if ur else math.fsum(rhs_terms), ul, ur, per)


@dataclass(frozen=True)
class CombinerCounterexample:
    conditioned_price: float
    combiner_value: float


def combiner_counterexample(up: float = 2.0, down: float = 0.5, p: float = 0.5) -> CombinerCounterexample:
    """Known-branch binomial: the insider superhedges ``1{up}`` on ``{G = up}`` for free.

    The label-wise combination of public prices gives ``q = (1-d)/(u-d)``
    there instead, because the conditional density jumps to zero.
    """
    tree = binomial(1.0, up, down, p)
    cond = condition_tree(tree, 1).as_tree()
    price = superhedge_tree(cond, {1: 1.0}).price
    public = superhedge_tree(tree, {1: 1.0}).price
    return CombinerCounterexample(price, public)


@dataclass(frozen=True)
class CostDecay:
    n: int
    cell_costs: tuple[float, ...]
    max_cost: float
    cells: tuple[tuple[int, ...], ...]


def equal_mass_cells(masses: list[float], n: int) -> list[list[int]]:
    """Split consecutive items into ``n`` groups of equal total mass (exactly, or raise)."""
    total = math.fsum(masses)
    target = total / n
    cells, cur, acc = [], [], 0.0
    for k, w in enumerate(masses):
        cur.append(k)
        acc += w
        if acc >= target * (1 - 1e-15) and len(cells) < n - 1:
            if acc != target:
                raise DomainError("leaf masses do not split into equal cells")
            cells.append(cur)
            cur, acc = [], 0.0
    cells.append(cur)
    if len(cells) != n or not cur:
        raise DomainError("leaf masses do not split into equal cells")
    return cells


def first_kind_cost_decay(tree: MarketTree, n: int, labels=None, verify_cells: int = 0) -> CostDecay:
    """Public superhedging cost of each cell of an equal-EMM-mass partition of ``labels``.

    In a complete tree that cost is the cell's martingale-measure mass, and an
    insider told which cell ``G`` lies in pays exactly that.  ``verify_cells``
    recomputes the first few costs by backward superhedging.
    """
    if not is_complete(tree):
        raise DomainError("tree is not complete")
    q = emm_leaf_masses(tree)
    leaves = [i for i in tree.leaves if labels is None or tree.label[i] in set(labels)]
    if len(leaves) < n:
        raise DomainError("fewer leaves than cells")
    groups = equal_mass_cells([q[i] for i in leaves], n)
    cells = tuple(tuple(tree.label[leaves[k]] for k in grp) for grp in groups)
    costs = tuple(math.fsum(q[leaves[k]] for k in grp) for grp in groups)
    for c in range(min(verify_cells, n)):
        sh = superhedge_tree(tree, {g: 1.0 for g in cells[c]}).price
        if abs(sh - costs[c]) > 1e-12:
            raise DomainError(f"cell {c}: superhedge {sh} differs from EMM mass {costs[c]}")
    return CostDecay(n, costs, max(costs), cells)


def insider_price_map(tree: MarketTree) -> dict[int, float]:
    """Insider cost of the sure claim 1 on each ``{G = g}``, from the conditioned tree."""
    return {g: superhedge_tree(condition_tree(tree, g).as_tree(), {g: 1.0}).price
            for g in tree.labels}


def tree_arbitrage_verdict(tree: MarketTree):
    """Optimal-arbitrage verdict of the label-informed insider on ``tree``."""
    from ..arbitrage import classify_arbitrage
    return classify_arbitrage(insider_price_map(tree))


def witness_tail_probability(tree: MarketTree, w: Witness, n: float, c: float) -> float:
    """Exact ``P(W_n > c)`` for the witness strategy.

    On ``{G = w.g}`` the insider holds ``n * direction`` shares over the step
    out of ``w.node`` and nothing otherwise, so ``W_n`` is that one-step gain
    on the label's paths through the node and 0 elsewhere.
    """
    reach = tree.reach_probabilities()
    m = label_mass(tree, w.g)
    total = []
    for p, child, move in zip(tree.probs[w.node], tree.children[w.node], tree.moves(w.node)):
        if n * w.direction * move > c:
            total.append(reach[w.node] * p * m[child])
    return math.fsum(total)
