"""Insider log- and power-utility in the two-Poisson market."""
from .ensemble import (COARSE_EPSILON, CompensatorRow, compensator_check, DEFAULT_EPSILON, EPSILON_SWEEP, EntropyIdentity, LogUtilityReport,
                       PathFunctionals, UtilityRow, admissibility_check, bucket_partition_residual,
                       dual_integral_estimate, dual_term, entropy_identity_check, insider_log_utility_report,
                       path_functionals)
from .power import (ConstantIntensities, PowerDualResult, concavity_certificate, density_log, dual_rate,
                    power_dual_inf, power_dual_value)
from .strategy import (PI_HIGH, PI_LOW, DegenerateInputError, EpsilonStopping, WealthPath, fraction_on_boundary,
                       optimal_fraction, simulate_log_wealth)

__all__ = [
    "COARSE_EPSILON", "CompensatorRow", "compensator_check", "DEFAULT_EPSILON", "EPSILON_SWEEP", "EntropyIdentity", "LogUtilityReport", "PathFunctionals",
    "UtilityRow", "admissibility_check", "bucket_partition_residual", "dual_integral_estimate", "dual_term",
    "entropy_identity_check", "insider_log_utility_report", "path_functionals", "ConstantIntensities",
    "PowerDualResult", "concavity_certificate", "density_log", "dual_rate", "power_dual_inf", "power_dual_value",
    "PI_HIGH", "PI_LOW", "DegenerateInputError", "EpsilonStopping", "WealthPath", "fraction_on_boundary",
    "optimal_fraction", "simulate_log_wealth",
]
