"""Exception types raised across shrinkerlab."""


class ShrinkerLabError(Exception):
    """Base class for all errors raised by this package."""


class OrientationError(ShrinkerLabError):
    """Mesh is non-manifold or its triangles are not consistently oriented."""


class DegeneracyError(ShrinkerLabError):
    """A triangle has (numerically) vanishing area."""


class BoundaryError(ShrinkerLabError):
    """A trusted value was requested at a boundary vertex."""


class SupportError(ShrinkerLabError):
    """A field that must be compactly supported is nonzero on the boundary."""


class StepError(ShrinkerLabError):
    """A finite-difference offset or time step produced an invalid mesh."""


class TimestepError(StepError):
    """Explicit time step exceeds the stability bound."""


class TimeDomainError(ShrinkerLabError):
    """Self-similar time parameter outside t < 0."""


class DimensionError(ShrinkerLabError):
    """Dimension argument outside the supported range."""


class AxisCrossingError(ShrinkerLabError):
    """A profile curve reached or crossed the rotation axis."""


class BracketError(ShrinkerLabError):
    """Shooting closure function has no sign change over the search range."""


class NotAShrinkerError(ShrinkerLabError):
    """Surface fails the shrinker residual threshold."""


class SolverError(ShrinkerLabError):
    """Eigensolver failed to converge to the requested residual."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class PositivityError(ShrinkerLabError):
    """A field required to be strictly positive is not."""
