from .density import (InsiderIntensityPair, conditional_density, density_bessel, insider_intensities, qi_weight,
                      terminal_log_pmf)
from .passage import PassageEnsemble, PassageStats, first_passage, first_passage_path, recursion_residual, \
    simulate_passage
from .paths import JumpPath, MarketParams, PathEnsemble, state
from .simulate import (TiltControls, TiltedEnsemble, TiltedPath, simulate_ensemble, simulate_path,
                       simulate_tilted_ensemble, simulate_tilted_path)

__all__ = [
    "InsiderIntensityPair", "conditional_density", "density_bessel", "insider_intensities", "qi_weight",
    "terminal_log_pmf", "PassageEnsemble", "PassageStats", "first_passage", "first_passage_path",
    "recursion_residual", "simulate_passage", "JumpPath", "MarketParams", "PathEnsemble", "state",
    "TiltControls", "TiltedEnsemble", "TiltedPath", "simulate_ensemble", "simulate_path",
    "simulate_tilted_ensemble", "simulate_tilted_path",
]
