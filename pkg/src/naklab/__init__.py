"""Exact Heisenberg-algebra computations on Fock spaces over graded Frobenius algebras."""

from __future__ import annotations

from .fock import CentralSign, FockVector, parse_vector, format_vector
from .frobenius import GradedFrobeniusAlgebra, validate
from .models import get_model
from .scalars import GaussianRational, I

__version__ = "0.1.0"

__all__ = [
    "CentralSign",
    "FockVector",
    "GaussianRational",
    "GradedFrobeniusAlgebra",
    "I",
    "format_vector",
    "get_model",
    "parse_vector",
    "validate",
]
