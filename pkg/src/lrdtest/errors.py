"""Exception hierarchy shared across the package."""


class LrdTestError(Exception):
    """Base class for all package errors."""


class DomainError(LrdTestError, ValueError):
    """A parameter is outside its mathematical domain."""


class SingularDesignError(LrdTestError):
    """A local design or moment matrix is numerically singular."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ConfigError(LrdTestError, ValueError):
    """Invalid run configuration."""


class DataError(LrdTestError, ValueError):
    """Malformed input data (CSV ingestion, shape mismatches)."""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column
