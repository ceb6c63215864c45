"""Linear relations induced by weighted composition symbols on a truncated Fock space."""

from .checks import CHECKS, CheckReport, run_check
from .errors import (
    DimensionMismatchError,
    FockrelError,
    InvalidConjugationError,
    InvalidSymbolError,
    TruncationOverflowError,
)
from .relation import LinearRelation, adjoint, s_adjoint
from .symbols import ConjugationParams, SymbolTriple, build_smax, build_smax_adjoint

__all__ = [
    "CHECKS",
    "CheckReport",
    "ConjugationParams",
    "DimensionMismatchError",
    "FockrelError",
    "InvalidConjugationError",
    "InvalidSymbolError",
    "LinearRelation",
    "SymbolTriple",
    "TruncationOverflowError",
    "adjoint",
    "build_smax",
    "build_smax_adjoint",
    "run_check",
    "s_adjoint",
]
