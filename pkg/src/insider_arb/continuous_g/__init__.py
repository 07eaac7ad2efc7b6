"""Continuous signals: partitions, entropy split, Brownian insider, theta-market bound, NUPBR probe."""
from .brownian import (BrownianExperiment, BrownianMarket, InsiderValueRow, StabilityError, TimeGrid,
                       bs_insider_experiment, time_grid, truncated_entropy)
from .partition import (EntropySplit, PartitionSpec, cell_probabilities, chain_rule_check, differential_entropy,
                        entropy_decomposition_check, make_partition)
from .probe import EXPLORATORY, ProbeResult, ProbeRow, interval_grid, nupbr_criterion_probe
from .theta import PiecewiseControl, ThetaMarket, UIBoundResult, log_density, random_controls, ui_bound_check

__all__ = [
    "BrownianExperiment", "BrownianMarket", "InsiderValueRow", "StabilityError", "TimeGrid",
    "bs_insider_experiment", "time_grid", "truncated_entropy", "EntropySplit", "PartitionSpec",
    "cell_probabilities", "chain_rule_check", "differential_entropy", "entropy_decomposition_check",
    "make_partition", "EXPLORATORY", "ProbeResult", "ProbeRow", "interval_grid", "nupbr_criterion_probe",
    "PiecewiseControl", "ThetaMarket", "UIBoundResult", "log_density", "random_controls", "ui_bound_check",
]
