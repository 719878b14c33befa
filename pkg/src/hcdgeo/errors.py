"""Exception hierarchy shared by the solver modules."""

from __future__ import annotations


class HCDError(Exception):
    """Base class for all errors raised by :mod:`hcdgeo`."""


class DomainError(HCDError, ValueError):
    """An input lies outside the domain where the map is defined."""


class NonConvergence(HCDError, RuntimeError):
    """An iterative solver hit its iteration cap.

    ``iterations`` and ``residual`` carry the state at the point of failure.
    """

    def __init__(self, message: str, iterations: int | None = None,
                 residual: float | None = None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class BracketFailure(HCDError, RuntimeError):
    """No sign change was found while expanding a root bracket."""


class NotDefined(HCDError, ValueError):
    """A threshold does not exist for the given parameters."""


class SingularSystem(HCDError, ArithmeticError):
    pass


class DegenerateDenominator(HCDError, ArithmeticError):
    pass


class AssumptionViolation(HCDError, ValueError):
    """The share schedule fails the regularity check required by a solver."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class NoConvergenceWithinHorizon(NonConvergence):
    """Migration dynamics did not settle; ``path`` holds the trajectory so far."""

    def __init__(self, message: str, path, iterations: int | None = None,
                 residual: float | None = None):
        super().__init__(message, iterations=iterations, residual=residual)
        self.path = path
