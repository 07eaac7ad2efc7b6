"""Finite one-asset event trees stored as flat arrays (root = node 0, preorder)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, InvariantError

PROB_TOL = 1e-12


@dataclass(frozen=True)
class MarketTree:
    price: tuple[float, ...]
    children: tuple[tuple[int, ...], ...]
    probs: tuple[tuple[float, ...], ...]
    label: tuple[int | None, ...]

    def __post_init__(self):
        n = len(self.price)
        if n == 0:
            raise DomainError("empty tree")
        if not (len(self.children) == len(self.probs) == len(self.label) == n):
            raise InvariantError("array lengths differ")
        seen = {0}
        for i in range(n):
            if not (self.price[i] > 0 and math.isfinite(self.price[i])):
                raise InvariantError(f"node {i}: price must be positive")
            kids, ps = self.children[i], self.probs[i]
            if len(kids) != len(ps):
                raise InvariantError(f"node {i}: children/probabilities mismatch")
            if kids:
                if self.label[i] is not None:
                    raise InvariantError(f"node {i}: internal node carries a label")
                if any(not p > 0 for p in ps) or abs(math.fsum(ps) - 1.0) > PROB_TOL:
                    raise InvariantError(f"node {i}: probabilities must be positive and sum to 1")
                for c in kids:
                    if c <= i or c >= n or c in seen:
                        raise InvariantError(f"node {i}: bad child index {c}")
                    seen.add(c)
            elif self.label[i] is None:
                raise InvariantError(f"leaf {i} has no label")
        if len(seen) != n:
            raise InvariantError("unreachable nodes")

    def __len__(self) -> int:
        return len(self.price)

    def is_leaf(self, i: int) -> bool:
        return not self.children[i]

    @property
    def leaves(self) -> list[int]:
        return [i for i in range(len(self)) if not self.children[i]]

    @property
    def labels(self) -> list[int]:
        return sorted({self.label[i] for i in self.leaves})

    def moves(self, i: int) -> list[float]:
        """Price changes ``S_child - S_node`` of node ``i``."""
        s = self.price[i]
        return [self.price[c] - s for c in self.children[i]]

    def returns(self, i: int) -> list[float]:
        s = self.price[i]
        return [self.price[c] / s - 1.0 for c in self.children[i]]

    def postorder(self) -> range:
        # children have larger indices than their parent
        return range(len(self) - 1, -1, -1)

    def reach_probabilities(self) -> np.ndarray:
        reach = np.zeros(len(self))
        reach[0] = 1.0
        for i in range(len(self)):
            for c, p in zip(self.children[i], self.probs[i]):
                reach[c] = reach[i] * p
        return reach

    def label_probabilities(self) -> dict[int, float]:
        reach = self.reach_probabilities()
        out: dict[int, list[float]] = {}
        for i in self.leaves:
            out.setdefault(self.label[i], []).append(reach[i])
        return {g: math.fsum(v) for g, v in sorted(out.items())}

    def depth(self) -> int:
        d = [0] * len(self)
        for i in range(len(self)):
            for c in self.children[i]:
                d[c] = d[i] + 1
        return max(d)

    # -- nested form -------------------------------------------------------
    def to_nested(self, i: int = 0) -> dict:
        if self.is_leaf(i):
            return {"price": self.price[i], "label": self.label[i]}
        return {"price": self.price[i],
                "children": [{"p": p, "node": self.to_nested(c)} for c, p in zip(self.children[i], self.probs[i])]}

    def to_json(self) -> str:
        return json.dumps(self.to_nested(), sort_keys=True)

    @classmethod
    def from_nested(cls, d: dict) -> "MarketTree":
        b = _Builder()
        b.add(d)
        return b.build()

    @classmethod
    def from_json(cls, text: str) -> "MarketTree":
        return cls.from_nested(json.loads(text))


class _Builder:
    def __init__(self):
        self.price, self.children, self.probs, self.label = [], [], [], []

    def add(self, d: dict) -> int:
        i = len(self.price)
        self.price.append(float(d["price"]))
        self.children.append(())
        self.probs.append(())
        kids = d.get("children") or []
        self.label.append(None if kids else int(d["label"]))
        ids, ps = [], []
        for k in kids:
            ps.append(float(k["p"]))
            ids.append(self.add(k["node"]))
        self.children[i] = tuple(ids)
        self.probs[i] = tuple(ps)
        return i

    def build(self) -> MarketTree:
        return MarketTree(tuple(self.price), tuple(self.children), tuple(self.probs), tuple(self.label))


def leaf(price: float, label: int) -> dict:
    return {"price": price, "label": label}


def node(price: float, *branches: tuple[float, dict]) -> dict:
    return {"price": price, "children": [{"p": p, "node": n} for p, n in branches]}


def binomial(s0: float = 1.0, up: float = 2.0, down: float = 0.5, p: float = 0.5) -> MarketTree:
    """One-period binomial; leaf labels 1 (up) and 0 (down)."""
    return MarketTree.from_nested(node(s0, (p, leaf(s0 * up, 1)), (1 - p, leaf(s0 * down, 0))))


def iid_binomial_tree(steps: int, up: float = 2.0, down: float = 0.5, p: float = 0.5, s0: float = 1.0) -> MarketTree:
    """``steps`` i.i.d. binomial periods as a non-recombining tree; labels are leaf indices."""
    counter = [0]

    def build(s, k):
        if k == steps:
            counter[0] += 1
            return leaf(s, counter[0] - 1)
        return node(s, (p, build(s * up, k + 1)), (1 - p, build(s * down, k + 1)))

    return MarketTree.from_nested(build(s0, 0))


def complete_binary(depth: int, up: float = 1.5, down: float = 0.5, p: float = 0.5, s0: float = 1.0) -> MarketTree:
    """Complete binary tree with labels ``0 .. 2^depth - 1`` in leaf order."""
    return iid_binomial_tree(depth, up, down, p, s0)
