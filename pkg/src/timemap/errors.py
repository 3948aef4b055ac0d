"""Exception hierarchy shared by all modules."""


class TimeMapError(Exception):
    """Base class for errors raised by this package."""


class DomainError(TimeMapError, ValueError):
    """An argument lies outside the domain of the operation."""


class IntegrandDomainError(DomainError):
    """The integrand returned a non-finite value at an interior node."""


class NumericError(TimeMapError, ArithmeticError):
    """A numerical computation produced an unusable result."""


class ConvergenceError(NumericError):
    """An iterative method failed to reach its tolerance.

    The best available estimate is kept in ``best`` so callers can decide
    whether it is good enough.
    """

    def __init__(self, message, best=None, error_estimate=None):
        super().__init__(message)
        self.best = best
        self.error_estimate = error_estimate


class NoSolutionError(NumericError):
    """The boundary-value problem has no solution for the given parameters."""


class StiffnessError(ConvergenceError):
    """The adaptive step size underflowed."""
