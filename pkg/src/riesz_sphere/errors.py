"""Exception types raised by riesz_sphere."""


class RieszSphereError(Exception):
    """Base class for library errors."""


class UnsupportedDimensionError(RieszSphereError, ValueError):
    """Sphere dimension or degree outside the supported range."""


class DimensionMismatchError(RieszSphereError, ValueError):
    pass


class QuadratureBudgetError(RieszSphereError):
    """Requested degree exceeds what the grid integrates exactly."""


class QuadratureConvergenceError(RieszSphereError):
    """Graded quadrature refinement stalled.

    ``achieved`` holds the last observed change between refinement levels.
    """

    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


class InequalityViolation(RieszSphereError):
    """A constant-1 inequality failed beyond the allowed slack."""

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness
