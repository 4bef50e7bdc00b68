"""Exception hierarchy shared by all modules."""


class InftySpecError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(InftySpecError, ValueError):
    """Domain parameters outside their admissible range."""


class InfeasibleError(InftySpecError, ValueError):
    """No positive shape parameter satisfies the volume constraint."""


class ResolutionError(InftySpecError):
    """Grid spacing too coarse: empty or disconnected occupancy."""


class ConnectivityError(ResolutionError):
    """An occupied cell could not be reached from the source."""


class BoundVacuousError(InftySpecError, ValueError):
    """delta2 * r >= 1, so the outer radius is not finite."""


class NotConvexError(InftySpecError, ValueError):
    """Operation requires a convex family."""


class NotCertifiedError(InftySpecError, ValueError):
    """No distance-cone eigenfunction is known for this family."""
