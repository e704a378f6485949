"""Generators, evolution, energy bookkeeping, decay fits and observability."""
from .decay import DecayReport, fit_decay, general_g_growth
from .evolve import (
    EnergyTrace,
    Trajectory,
    correction_split,
    dissipation_residual,
    evolve,
    step_operators,
)
from .generator import (
    GeneratorPair,
    SpectralWeight,
    assemble_generator,
    conservative_eigenbasis,
    damped_from_obs,
    hautus_residual,
    modal_coefficients,
    spectral_norm,
    spectral_radius_estimate,
)
from .observability import (
    ObservabilityReport,
    modal_gramian,
    observability_constant,
    observability_gramian,
)
from .parallel import parallel_map

__all__ = [
    "DecayReport", "EnergyTrace", "GeneratorPair", "ObservabilityReport", "SpectralWeight",
    "Trajectory", "assemble_generator", "conservative_eigenbasis", "correction_split",
    "damped_from_obs", "dissipation_residual", "evolve", "fit_decay", "general_g_growth",
    "hautus_residual", "modal_coefficients", "modal_gramian", "observability_constant",
    "observability_gramian", "parallel_map", "spectral_norm", "spectral_radius_estimate",
    "step_operators",
]
