"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so new error conditions should
reuse one of the classes below rather than raising bare ValueError.
"""


class PonasError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PonasError, ValueError):
    """Invalid data: bad shapes, out-of-range entries, length mismatches."""


class TableFormatError(ValidationError):
    """A table file is malformed or does not match the expected schema."""


class InfeasibleError(PonasError):
    """No architecture in the search space satisfies the cost constraint.

    Carries the cheapest achievable cost so callers can report how far off
    the ceiling is.
    """

    def __init__(self, message, cheapest=None):
        super().__init__(message)
        self.cheapest = cheapest


class SearchSpaceTooLargeError(PonasError):
    """Exhaustive enumeration was requested on a space above the guard size."""
