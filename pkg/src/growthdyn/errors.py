"""Exception hierarchy shared by every growthdyn module."""


class GrowthDynError(Exception):
    """Base class for all library errors."""


class DimensionError(GrowthDynError):
    """Vector or matrix sizes are inconsistent or below the minimum."""


class ConstraintError(GrowthDynError):
    """A point violates the probability-simplex constraints."""


class DegenerateError(GrowthDynError):
    """A normalisation or mean is zero or negative where positivity is required."""


class ParameterError(GrowthDynError):
    """A scalar parameter is outside its admissible range."""


class UnknownGameError(GrowthDynError):
    """Requested named game is not in the catalogue."""


class PositivityError(GrowthDynError):
    """A fitness value that must be strictly positive is not."""


class UnsupportedFamilyError(GrowthDynError):
    """The requested operation is not defined for this dynamics family."""


class DomainError(GrowthDynError):
    """A cost function was evaluated outside its domain."""


class QuadratureError(GrowthDynError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class StepFailureError(GrowthDynError):
    """The integrator could not take a positivity-preserving step."""


class GraphParseError(GrowthDynError):
    """A graph file is malformed."""


class SizeError(GrowthDynError):
    """Problem size exceeds the supported maximum."""
