"""Exact finite-tree oracle for superhedging, log utility and insider conditioning."""
from .fuzz import FuzzRow, fuzz_row, random_balanced_tree, random_na_tree, tree_fuzz
from .insider import (CombinerCounterexample, ConditionedTree, CostDecay, Decomposition, Witness,
                      combiner_counterexample, condition_tree, equal_mass_cells, first_kind_cost_decay, label_mass,
                      insider_price_map, label_decomposition, nupbr_witness, tree_arbitrage_verdict,
                      witness_tail_probability)
from .superhedge import (EmmResult, SuperhedgeResult, emm_leaf_masses, is_complete, leaf_claim, one_step_na,
                         one_step_vertices, sup_over_emm, superhedge_tree)
from .tree import MarketTree, binomial, complete_binary, iid_binomial_tree, leaf, node
from .utility import KLDualResult, LogUtilityResult, kl_projection, log_utility_dual, log_utility_primal, optimal_step

__all__ = [
    "FuzzRow", "fuzz_row", "random_balanced_tree", "random_na_tree", "tree_fuzz", "CombinerCounterexample", "ConditionedTree", "CostDecay",
    "Decomposition", "Witness", "combiner_counterexample", "condition_tree", "equal_mass_cells",
    "first_kind_cost_decay", "insider_price_map", "label_mass", "tree_arbitrage_verdict", "witness_tail_probability", "label_decomposition", "nupbr_witness", "EmmResult",
    "SuperhedgeResult", "emm_leaf_masses", "is_complete", "leaf_claim", "one_step_na", "one_step_vertices",
    "sup_over_emm", "superhedge_tree", "MarketTree", "binomial", "complete_binary", "iid_binomial_tree", "leaf",
    "node", "KLDualResult", "LogUtilityResult", "kl_projection", "log_utility_dual", "log_utility_primal",
    "optimal_step",
]
