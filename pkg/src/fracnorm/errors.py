"""Exception types shared across the package."""


class FracNormError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FracNormError, ValueError):
    """An argument lies outside the admissible range of an operation."""


class DivergenceError(FracNormError, ArithmeticError):
    """A norm or integral that was asked for is infinite."""


class SingularPointError(FracNormError, ValueError):
    """A function was evaluated exactly at an annotated pole."""


class ConvergenceError(FracNormError, RuntimeError):
    """Quadrature did not reach its tolerance within the subdivision budget.

    The best available estimate is kept on the exception so callers can
    decide whether it is good enough.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class InsufficientDataError(FracNormError, ValueError):
    """Too few samples for a fit."""


class EmptyResultError(FracNormError, RuntimeError):
    """Every candidate in a family was rejected."""
