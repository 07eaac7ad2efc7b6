"""Random no-arbitrage trees and the duality fuzzing harness."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .superhedge import one_step_na, sup_over_emm, superhedge_tree
from .tree import MarketTree
from .utility import log_utility_dual, log_utility_primal

SUPERHEDGE_TOL = 1e-10
LOG_TOL = 1e-8


def random_na_tree(rng: np.random.Generator, max_depth: int = 4, max_branch: int = 3, n_labels: int = 3,
                   min_gap: float = 0.05) -> MarketTree:
    """Random tree with one-step NA at every internal node.

    Child returns are drawn so that at least one is above and one below the
    node price by ``min_gap`` relative, which keeps the node strictly inside
    the convex hull of its children (degenerate nodes are rejected by design).
    """
    depth = int(rng.integers(1, max_depth + 1))

    def build(s, level):
        if level == depth or (level > 0 and rng.random() < 0.2):
            return {"price": s, "label": int(rng.integers(0, n_labels))}
        k = int(rng.integers(2, max_branch + 1))
        rets = [float(rng.uniform(min_gap, 0.8)), -float(rng.uniform(min_gap, 0.6))]
        rets += [float(rng.uniform(-0.6, 0.8)) for _ in range(k - 2)]
        rng.shuffle(rets)
        w = rng.uniform(0.2, 1.0, size=k)
        w = w / w.sum()
        w[-1] = 1.0 - w[:-1].sum()
        return {"price": s, "children": [{"p": float(p), "node": build(s * (1.0 + r), level + 1)}
                                         for p, r in zip(w, rets)]}

    for _ in range(100):
        tree = MarketTree.from_nested(build(1.0, 0))
        if all(one_step_na(tree, i) and _nondegenerate(tree, i)
               for i in range(len(tree)) if not tree.is_leaf(i)):
            return tree
    raise RuntimeError("could not draw a non-degenerate tree")


def random_balanced_tree(rng: np.random.Generator, depth: int = 2, n_labels: int = 2,
                         min_gap: float = 0.05) -> MarketTree:
    """Random NA tree on which conditioning on any label keeps one-step NA.

    Every node one step above the leaves has, for each label, one leaf above
    and one below its price; higher nodes have two children of opposite
    sign.  Every subtree therefore carries every label on both sides.
    """
    def probs(k):
        w = rng.uniform(0.2, 1.0, size=k)
        w = w / w.sum()
        w[-1] = 1.0 - w[:-1].sum()
        return [float(x) for x in w]

    def build(s, level):
        if level == depth - 1:
            kids = []
            for g in range(n_labels):
                kids.append({"price": s * (1.0 + float(rng.uniform(min_gap, 0.8))), "label": g})
                kids.append({"price": s * (1.0 - float(rng.uniform(min_gap, 0.6))), "label": g})
            return {"price": s, "children": [{"p": p, "node": k} for p, k in zip(probs(len(kids)), kids)]}
        rets = [float(rng.uniform(min_gap, 0.8)), -float(rng.uniform(min_gap, 0.6))]
        return {"price": s, "children": [{"p": p, "node": build(s * (1.0 + r), level + 1)}
                                         for p, r in zip(probs(2), rets)]}

    return MarketTree.from_nested(build(1.0, 0))


def _nondegenerate(tree: MarketTree, i: int) -> bool:
    d = tree.moves(i)
    return min(d) < 0 < max(d)


@dataclass(frozen=True)
class FuzzRow:
    index: int
    nodes: int
    superhedge: float
    emm: float
    primal: float
    dual: float

    @property
    def superhedge_gap(self) -> float:
        return abs(self.superhedge - self.emm)

    @property
    def log_gap(self) -> float:
        return abs(self.primal - self.dual)

    @property
    def passed(self) -> bool:
        return self.superhedge_gap <= SUPERHEDGE_TOL and self.log_gap <= LOG_TOL


def fuzz_row(seed: int, index: int) -> FuzzRow:
    rng = np.random.default_rng([seed, index])
    tree = random_na_tree(rng)
    claim = rng.uniform(0.0, 2.0, size=len(tree.leaves))
    claim[rng.random(claim.size) < 0.3] = 0.0
    sh = superhedge_tree(tree, claim).price
    em = sup_over_emm(tree, claim).value
    primal = log_utility_primal(tree).value
    dual = log_utility_dual(tree).value
    return FuzzRow(index, len(tree), sh, em, primal, dual)


def tree_fuzz(count: int, seed: int) -> list[FuzzRow]:
    return [fuzz_row(seed, i) for i in range(count)]
