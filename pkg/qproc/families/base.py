"""
Base interface for event families: events A given by per-prefix coverage
fractions nu(A & cyl(g)) / nu(cyl(g))
"""

import logging
from abc import ABC, abstractmethod
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from ..models.path import CylinderEvent, NPath
from ..pathspace import index_range, path_digits

logger = logging.getLogger(__name__)


class FamilyKind(str, Enum):
    """How an event sits relative to the cylinder algebra"""
    CYLINDER = "cylinder"
    TAIL = "tail"
    COUNTABLE = "countable"
    COMPLEMENT = "complement"


class EventFamily(ABC):
    """Base class for coverage-represented events"""

    kind: FamilyKind = FamilyKind.TAIL

    def __init__(self, m: int, name: str):
        if m < 1:
            raise ValueError("Site count must be positive")
        self.m = m
        self.name = name

    @abstractmethod
    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        """
        Coverage fractions for a batch of rank-t prefixes

        Args:
            t: Prefix rank
            digits: Integer array of shape (N, t + 1), one prefix per row

        Returns:
            Float array of N values in [0, 1]
        """
        pass

    @property
    def native_rank(self) -> Optional[int]:
        """Rank from which coverage is 0/1 valued (cylinder events only)"""
        return None

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        """Exact nu(A) where it is known in closed form"""
        return None

    def to_event(self, fixed_initial_site: Optional[int] = None) -> Optional[CylinderEvent]:
        """The n-event behind a cylinder family (prefixes with coverage 1 at the native rank)"""
        n = self.native_rank
        if n is None:
            return None
        start, stop = index_range(self.m, n, fixed_initial_site)
        values = self.coverage(n, path_digits(self.m, n, start, stop))
        mask = np.zeros(self.m ** (n + 1), dtype=bool)
        mask[start:stop] = values >= 0.5
        return CylinderEvent.from_mask(self.m, n, mask)

    def coverage_of(self, path: NPath) -> float:
        """Coverage of a single prefix"""
        digits = np.asarray([path.sites], dtype=np.int64)
        return float(self.coverage(path.rank, digits)[0])

    def martingale_residual(self, t: int, fixed_initial_site: Optional[int] = None) -> float:
        """
        max |coverage(g) - mean of coverage over the m children of g|

        Zero (up to rounding) for any coverage that comes from an actual event.
        """
        start, stop = index_range(self.m, t, fixed_initial_site)
        parent = self.coverage(t, path_digits(self.m, t, start, stop))
        child_start, child_stop = index_range(self.m, t + 1, fixed_initial_site)
        children = self.coverage(t + 1, path_digits(self.m, t + 1, child_start, child_stop))
        means = children.reshape(-1, self.m).mean(axis=1)
        return float(np.max(np.abs(parent - means))) if parent.size else 0.0

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r}, m={self.m}, kind={self.kind.value})"
