"""Exception types shared across the package."""


class GGNError(Exception):
    """Base class for all package errors."""


class DomainError(GGNError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(GGNError, ArithmeticError):
    """A coefficient formula hits a pole for the requested parameters."""


class SeriesConvergenceError(GGNError, ArithmeticError):
    """A truncated series failed its stopping rule.

    The partial result and the diagnostics are kept on the exception so
    callers can still inspect the achieved residual.
    """

    def __init__(self, message, partial=None, terms=None):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


class FitError(GGNError, RuntimeError):
    """Raised when a fit cannot even be attempted (e.g. support violation)."""


class SingularScoreError(GGNError, ArithmeticError):
    """The score is infinite: an observation sits exactly at ``mu`` with ``s < 1``."""
