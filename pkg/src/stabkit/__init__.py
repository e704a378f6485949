"""Energy decay and observability checks for damped second-order systems.

The ``core`` subpackage holds the generic machinery (generators, exact time
stepping, decay fits, observability Gramians). ``beam``, ``thermo``,
``hybrid1d`` and ``schrodinger`` build concrete examples on top of it.
"""
__version__ = "0.1.0"

from . import core, errors  # noqa: E402
from .core import (  # noqa: E402
    DecayReport,
    GeneratorPair,
    ObservabilityReport,
    SpectralWeight,
    Trajectory,
    assemble_generator,
    correction_split,
    evolve,
    fit_decay,
    observability_constant,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "BACKEND",
    "DecayReport",
    "GeneratorPair",
    "ObservabilityReport",
    "SpectralWeight",
    "Trajectory",
    "assemble_generator",
    "core",
    "correction_split",
    "errors",
    "evolve",
    "fit_decay",
    "observability_constant",
]
