"""Superhedging and log-utility duality on the binomial example and a few random trees."""
import math

import numpy as np

from insider_arb.tree_oracle import (binomial, fuzz_row, insider_price_map, label_decomposition,
                                     log_utility_dual, log_utility_primal, random_balanced_tree, superhedge_tree)


def main():
    b = binomial()
    print(f"binomial: superhedge 1{{up}} = {superhedge_tree(b, {1: 1.0}).price:.12f} (1/3)")
    print(f"binomial: log value primal {log_utility_primal(b).value:.12f}, dual {log_utility_dual(b).value:.12f}, "
          f"closed form {0.5 * math.log(9 / 8):.12f}")
    print(f"binomial insider prices of 1: {insider_price_map(b)}")
    for i in range(5):
        r = fuzz_row(0, i)
        print(f"tree {i}: {r.nodes:>3} nodes  superhedge gap {r.superhedge_gap:.1e}  log gap {r.log_gap:.1e}")
    d = label_decomposition(random_balanced_tree(np.random.default_rng(0), depth=3, n_labels=3))
    print(f"label decomposition: lhs {d.lhs:.12f} rhs {d.rhs:.12f}")


if __name__ == "__main__":
    main()
