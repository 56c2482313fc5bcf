"""Exception types shared across the package."""

from __future__ import annotations


class FairshareError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(FairshareError, ValueError):
    """Invalid input: malformed data, bad arguments, unreachable vertices."""


class GraphParseError(ValidationError):
    """Malformed edge-list text; remembers the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class CapacityError(FairshareError, ValueError):
    """Passenger or coalition count above the supported bitmask caps."""
