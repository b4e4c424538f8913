"""Exception hierarchy shared across the package."""


class QvarError(Exception):
    """Base class for all package errors."""


class ConfigError(QvarError):
    """Bad parameters, malformed config/spec strings, missing files."""


class DomainError(QvarError):
    """Query outside the admissible time domain or grid."""


class UsageError(QvarError):
    """API misuse: wrong argument shapes, infeasible requests."""


class DataError(QvarError):
    """Invalid numerical data: non-finite entries, broken symmetry, bad CSV."""


class CapacityError(QvarError):
    """Request exceeds a hard size limit (e.g. brute-force oracle)."""


class NumericalError(QvarError):
    """Numerical failure during computation."""


class NotPSDError(NumericalError):
    """Matrix is not positive semidefinite beyond tolerance."""

    def __init__(self, message, offending_value=None):
        super().__init__(message)
        self.offending_value = offending_value


class DegenerateError(NumericalError):
    """Degenerate quantity (zero variance) where a positive one is required."""
