"""Exception and warning types raised by stabkit."""


class StabkitError(Exception):
    """Base class for all stabkit errors."""


# generator assembly and evolution
class DimensionMismatch(StabkitError, ValueError):
    pass


class NotSkewAdjoint(StabkitError, ValueError):
    pass


class NotDissipative(StabkitError, ValueError):
    pass


class UnstableStep(StabkitError, RuntimeError):
    pass


class ZeroVector(StabkitError, ValueError):
    pass


# decay fitting
class NonPositiveEnergy(StabkitError, ValueError):
    pass


class InsufficientSamples(StabkitError, ValueError):
    pass


# observability / spectral weights
class SingularWeight(StabkitError, ValueError):
    pass


class BasisMismatch(StabkitError, ValueError):
    pass


class QuadratureUnresolved(StabkitError, RuntimeError):
    """Halving the quadrature step moved the observability constant too much."""


# beam
class BeamOverflow(StabkitError, OverflowError):
    pass


class BracketFailure(StabkitError, RuntimeError):
    pass


class DegenerateDeterminant(StabkitError, RuntimeError):
    pass


# wave/Schrodinger
class ExcludedMu(StabkitError, ValueError):
    pass


class SeedDivergence(StabkitError, RuntimeError):
    pass


class BranchAmbiguity(StabkitError, RuntimeError):
    pass


class RationalDetected(StabkitError, ValueError):
    pass


class SingularSystem(StabkitError, RuntimeError):
    pass


class BasisIncomplete(StabkitError, ValueError):
    pass


# hybrid
class GridTooCoarse(StabkitError, ValueError):
    pass


# cli
class ConfigInvalid(StabkitError, ValueError):
    pass


class HorizonTooShort(UserWarning):
    """Observation horizon below the Ingham gap condition."""


class XiNotInS(UserWarning):
    """Damping point with unbounded continued-fraction quotients (to the tested depth)."""


class ZeroDenominator(UserWarning):
    """Observed damped output vanished identically; ratio reported as 0."""
