"""Exception and warning classes raised across the package."""


class HSMaternError(Exception):
    """Base class for all package errors."""


class DomainError(HSMaternError, ValueError):
    """An argument lies outside the admissible range of an operation."""


class PreconditionError(HSMaternError, ValueError):
    """A structural precondition (monotonicity, normalization, ...) fails."""


class PointSetError(HSMaternError, ValueError):
    """Invalid point set. ``pair`` holds offending indices when known."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class AccuracyError(HSMaternError, ArithmeticError):
    """A numerical procedure did not reach the requested tolerance.

    The best available estimate is attached as ``partial``.
    """

    def __init__(self, message, partial=None, est_error=None):
        super().__init__(message)
        self.partial = partial
        self.est_error = est_error


class DivergenceError(HSMaternError, ArithmeticError):
    """An integral that must be finite appears to diverge."""


class SingularMatrixError(HSMaternError, ArithmeticError):
    """A Schoenberg system could not be factorized."""


class BesselOverflowWarning(RuntimeWarning):
    """K_alpha overflowed; the returned value is +inf."""
