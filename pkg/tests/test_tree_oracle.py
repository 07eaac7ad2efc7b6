import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from insider_arb.arbitrage import Verdict
from insider_arb.errors import DomainError, InvariantError
from insider_arb.tree_oracle import (MarketTree, binomial, combiner_counterexample, complete_binary,
                                     condition_tree, emm_leaf_masses, equal_mass_cells, first_kind_cost_decay,
                                     fuzz_row, insider_price_map, is_complete, label_mass, leaf,
                                     label_decomposition, log_utility_dual, log_utility_primal, node,
                                     nupbr_witness, one_step_vertices, random_balanced_tree, random_na_tree,
                                     sup_over_emm, superhedge_tree, tree_arbitrage_verdict, tree_fuzz,
                                     witness_tail_probability)

BINOMIAL_LOG = 0.5 * math.log(9 / 8)


def trinomial():
    return MarketTree.from_nested(node(1.0, (0.3, leaf(1.5, 0)), (0.4, leaf(1.0, 1)), (0.3, leaf(0.6, 2))))


def test_binomial_values():
    b = binomial()
    assert superhedge_tree(b, {1: 1.0}).price == pytest.approx(1 / 3, abs=1e-12)
    assert log_utility_primal(b).value == pytest.approx(BINOMIAL_LOG, abs=1e-12)
    assert log_utility_primal(b).value == pytest.approx(0.0588915, abs=1e-7)
    assert log_utility_dual(b).value == pytest.approx(BINOMIAL_LOG, abs=1e-10)
    assert is_complete(b)
    q = emm_leaf_masses(b)
    assert sorted(q.values()) == pytest.approx([1 / 3, 2 / 3])


def test_trinomial_incomplete_superhedge():
    t = trinomial()
    assert not is_complete(t)
    claim = {0: 1.0}
    sh = superhedge_tree(t, claim).price
    assert sh == pytest.approx(sup_over_emm(t, claim).value, abs=1e-12)
    # the EMM vertices of a three-point step are the two-point measures
    assert sh == pytest.approx(0.4 / 0.9, abs=1e-12)
    verts = one_step_vertices([0.5, 0.0, -0.4])
    for v in verts:
        assert math.fsum(v.values()) == pytest.approx(1.0)
        assert math.fsum(p * d for k, p in v.items() for d in [[0.5, 0.0, -0.4][k]]) == pytest.approx(0.0, abs=1e-15)


def test_tree_validation_and_json():
    with pytest.raises(InvariantError):
        MarketTree.from_nested(node(1.0, (0.5, leaf(2.0, 0)), (0.4, leaf(0.5, 1))))
    with pytest.raises(InvariantError):
        MarketTree.from_nested(node(1.0, (0.5, leaf(-2.0, 0)), (0.5, leaf(0.5, 1))))
    b = binomial()
    assert MarketTree.from_json(b.to_json()) == b


@given(st.integers(0, 2**32 - 1))
def test_random_tree_duality(seed):
    r = fuzz_row(seed, 0)
    assert r.superhedge_gap <= 1e-10
    assert r.log_gap <= 1e-8


@given(st.integers(0, 2**32 - 1))
def test_superhedge_dominates_claim(seed):
    rng = np.random.default_rng(seed)
    t = random_na_tree(rng)
    claim = rng.uniform(0, 1, size=len(t.leaves))
    res = superhedge_tree(t, claim)
    assert res.price <= max(claim) + 1e-12
    assert res.price >= min(claim) - 1e-12
    assert superhedge_tree(t, 2 * claim).price == pytest.approx(2 * res.price, rel=1e-12, abs=1e-15)


def test_tree_fuzz_deterministic():
    assert tree_fuzz(5, 9) == tree_fuzz(5, 9)


@given(st.integers(0, 2**32 - 1), st.integers(2, 3))
def test_label_decomposition_on_balanced_trees(seed, n_labels):
    t = random_balanced_tree(np.random.default_rng(seed), depth=2, n_labels=n_labels)
    d = label_decomposition(t)
    assert not d.unbounded_lhs and not d.unbounded_rhs
    assert d.consistent


def test_conditioning():
    b = binomial()
    c = condition_tree(b, 1)
    assert c.probability == pytest.approx(0.5)
    assert label_mass(b, 1)[0] == pytest.approx(0.5)
    assert insider_price_map(b) == {0: 0.0, 1: 0.0}
    assert tree_arbitrage_verdict(b).verdict == Verdict.STRONG


def test_combiner_counterexample():
    cx = combiner_counterexample()
    assert cx.conditioned_price == 0.0
    assert cx.combiner_value == pytest.approx(1 / 3)


def test_witness_tail():
    b = binomial()
    w = nupbr_witness(b)
    assert w is not None and w.gain > 0
    pg = label_mass(b, w.g)[0]
    for n in (1.0, 10.0, 1000.0):
        for frac in (0.0, 0.5, 0.999):
            assert witness_tail_probability(b, w, n, frac * n * w.gain) >= pg
        assert witness_tail_probability(b, w, n, n * w.gain) == 0.0
    assert nupbr_witness(trinomial()) is None or nupbr_witness(trinomial()).gain > 0


def test_prop41_small():
    t = complete_binary(6)
    for n in (2, 4, 8, 64):
        d = first_kind_cost_decay(t, n, verify_cells=2)
        assert d.max_cost == 1.0 / n
    with pytest.raises(DomainError):
        first_kind_cost_decay(t, 128)
    with pytest.raises(DomainError):
        first_kind_cost_decay(trinomial(), 2)


def test_equal_mass_cells():
    assert equal_mass_cells([0.25] * 4, 2) == [[0, 1], [2, 3]]
    with pytest.raises(DomainError):
        equal_mass_cells([0.4, 0.3, 0.3], 2)
