"""
Event families: coverage-represented events beyond the cylinder algebra
"""

from .base import EventFamily, FamilyKind
from .builtin import (
    CylinderFamily,
    PositionFamily,
    FirstVisitFamily,
    AvoidsSiteFamily,
    VisitsSiteFamily,
    NeverVisitsSiteFamily,
    CountableFamily,
    SingletonFamily,
    ComplementOfCountableFamily,
    UnionFamily,
    CoverageTableFamily,
    prefix_cylinder,
)
from .factory import FamilyFactory, builtin_families

__all__ = [
    "EventFamily",
    "FamilyKind",
    "CylinderFamily",
    "PositionFamily",
    "FirstVisitFamily",
    "AvoidsSiteFamily",
    "VisitsSiteFamily",
    "NeverVisitsSiteFamily",
    "CountableFamily",
    "SingletonFamily",
    "ComplementOfCountableFamily",
    "UnionFamily",
    "CoverageTableFamily",
    "prefix_cylinder",
    "FamilyFactory",
    "builtin_families",
]
