"""
Adele Lab error hierarchy

Every failure raised by the library derives from AdeleLabError. The CLI maps
the classes onto its exit-code contract through ``exit_code``.
"""


class AdeleLabError(Exception):
    """Base class for all library errors."""

    exit_code = 2


class DomainError(AdeleLabError, ValueError):
    """Input outside the mathematical domain of an operation."""


class BadPrimeError(DomainError):
    """The prime divides a numerator or denominator the operation must invert."""

    def __init__(self, p: int, reason: str):
        super().__init__(f"bad prime {p}: {reason}")
        self.p = p
        self.reason = reason


class PoleError(DomainError):
    """A denominator of the exact value is divisible by the prime."""

    def __init__(self, p: int, reason: str):
        super().__init__(f"pole at p={p}: {reason}")
        self.p = p
        self.reason = reason


class CapacityError(AdeleLabError):
    """A configured ceiling or combinatorial guardrail was exceeded."""

    exit_code = 3


class StructuralError(AdeleLabError):
    """Mismatched windows or too many bad coordinates."""


class ConsistencyError(AdeleLabError):
    """Two independent computation paths disagree."""

    exit_code = 1


class ConfigError(AdeleLabError):
    """Unreadable or invalid configuration."""
