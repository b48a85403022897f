"""
Exceptions raised by the scheduler services.
"""

from typing import Optional


class MappingError(Exception):
    """Base class for all scheduler errors."""


class NonDivisibleUnrolling(MappingError):
    """A spatial unrolling factor does not divide its loop dimension."""


class InfeasibleLowestLevel(MappingError):
    """A single-element tile does not fit an operand's lowest serving level."""


class SpaceTooLarge(MappingError):
    """The ordering space exceeds the configured limit for the requested search."""


class BudgetExceeded(MappingError):
    """The oracle simulation would run more iterations than its budget allows."""


class UnsupportedMetric(MappingError):
    """The objective metric is reserved but not implemented."""


class NonPositiveInput(MappingError, ValueError):
    pass


class IndexOutOfRange(MappingError, IndexError):
    pass


class SameIndex(MappingError, ValueError):
    pass


class TooShort(MappingError, ValueError):
    pass


class ConfigError(MappingError):
    """A configuration file could not be read or failed validation."""

    def __init__(self, path: str, key: Optional[str], message: str):
        self.path = path
        self.key = key
        location = f"{path}: {key}" if key else path
        super().__init__(f"{location}: {message}")
