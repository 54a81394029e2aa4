"""Gamma approximation on the second Wiener chaos: cumulants, Gamma-operator
variances, explicit distance bounds and exact or Monte Carlo distances."""

__version__ = "0.1.0"

from .chaos2 import EigenvalueSpec, canonicalize, family
from .errors import ConfigError, DomainError, GammaChaosError, NumericError
from .target_gamma import GammaTarget

__all__ = [
    "__version__",
    "EigenvalueSpec",
    "GammaTarget",
    "canonicalize",
    "family",
    "GammaChaosError",
    "DomainError",
    "NumericError",
    "ConfigError",
]
