"""Exception hierarchy shared by every module."""


class GelError(Exception):
    """Base class for all errors raised by gel."""


class DomainError(GelError, ValueError):
    """An argument lies outside the mathematical domain of a routine."""


class CoverageError(GelError):
    """A query reaches beyond the data a spectrum or dataset was built for."""


class RangeError(GelError, ValueError):
    """A truncation parameter is outside its admissible range."""


class RegionError(GelError, ValueError):
    """A renormalizer case was requested outside its region of validity."""


class ResourceLimitError(GelError):
    """A computation would exceed a configured size cap."""


class InsufficientCheckpointsError(GelError):
    """Too few checkpoints to estimate a limit."""


class ParseError(GelError, ValueError):
    """Malformed input text (CLI values or data files)."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ParseError):
    """A data file parsed but failed a consistency check."""


class VersionError(GelError):
    """A data file has an unknown format version."""
