"""Toeplitz operators on weighted Fock spaces: kernels, measures, Berezin transforms and Schatten norms."""

from .core_math import DomainError, SingularWeightError, SpaceParams, Tolerances
from .kernel import EntirePoly, kernel_eval, normalized_kernel
from .measure import load_measure
from .toeplitz import assemble, schatten_norm

__all__ = [
    "DomainError",
    "EntirePoly",
    "SingularWeightError",
    "SpaceParams",
    "Tolerances",
    "assemble",
    "kernel_eval",
    "load_measure",
    "normalized_kernel",
    "schatten_norm",
]

__version__ = "0.1.0"
