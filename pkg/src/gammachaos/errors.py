"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class GammaChaosError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GammaChaosError, ValueError):
    """An argument lies outside the domain of the operation."""


class NumericError(GammaChaosError, ArithmeticError):
    """A numerical routine failed to reach its tolerance.

    ``estimate`` and ``error`` carry the best value found so far, so callers
    can decide whether a partial answer is still usable.
    """

    def __init__(self, message: str, estimate: float | None = None, error: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigError(GammaChaosError, ValueError):
    """An experiment configuration is inconsistent."""
