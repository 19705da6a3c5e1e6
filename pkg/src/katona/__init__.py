"""Exact extremal-family computations for arcs on the cycle [n]."""

from .core import Arc, ArcFamily, DomainError, GroundSet, PointSet, SetFamily, load_family
from .search import BudgetExceeded, Constraint, SearchProblem, SearchReport, SlotSpec, maximize
from .theorems import THEOREMS, BoundViolation, verify_bound

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "ArcFamily",
    "BoundViolation",
    "BudgetExceeded",
    "Constraint",
    "DomainError",
    "GroundSet",
    "PointSet",
    "SearchProblem",
    "SearchReport",
    "SetFamily",
    "SlotSpec",
    "THEOREMS",
    "load_family",
    "maximize",
    "verify_bound",
]
