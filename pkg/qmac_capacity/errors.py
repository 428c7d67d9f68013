"""
Exception hierarchy shared by the numerical core and the command layer
"""

from typing import Optional


class QmacError(Exception):
    """Base class for every error raised by the toolkit."""

    exit_code: int = 2


class LayoutError(QmacError, ValueError):
    """Subsystem layout does not match the matrix it annotates, or names an unknown label."""


class ValidationError(QmacError, ValueError):
    """An object violates its invariants (hermiticity, trace, positivity, CPTP, distribution)."""


class NumericalError(QmacError, ArithmeticError):
    """A numerical routine failed to converge."""


class DimensionCapError(QmacError):
    """A requested construction exceeds the configured dimension cap."""

    exit_code = 3


class ConfigurationError(QmacError):
    """Configuration file or optimizer settings are invalid."""


class SpecFileError(ValidationError):
    """A JSON input file (channel spec, state, region) could not be parsed.

    Carries the offending field path and, for JSON syntax errors, the
    line and column reported by the decoder.
    """

    def __init__(self, message: str, field: Optional[str] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        self.field = field
        self.line = line
        self.column = column
        location = []
        if line is not None:
            location.append(f"line {line}, column {column}")
        if field:
            location.append(f"field '{field}'")
        suffix = f" ({'; '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")
