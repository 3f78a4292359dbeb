"""Forbidden-subposet problems for posets whose Hasse diagram is a tree."""
from .errors import (
    CycleError,
    FamilyFormatError,
    PosetFormatError,
    PreconditionError,
    SaturationError,
    SearchBudgetExceeded,
    WindowTooSmall,
)
from .lattice import Family, MarkedChain, MarkerClass, middle_levels, parse_family
from .poset import Embedding, Poset, PosetReport, analyze, find_subposet, parse_poset

__all__ = [
    "CycleError",
    "Embedding",
    "Family",
    "FamilyFormatError",
    "MarkedChain",
    "MarkerClass",
    "Poset",
    "PosetFormatError",
    "PosetReport",
    "PreconditionError",
    "SaturationError",
    "SearchBudgetExceeded",
    "WindowTooSmall",
    "analyze",
    "find_subposet",
    "middle_levels",
    "parse_family",
    "parse_poset",
]
