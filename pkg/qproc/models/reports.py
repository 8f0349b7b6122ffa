"""
Result models for spectra, suitability sweeps and consistency checks
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.utils import complex_to_json, spread


class Verdict(str, Enum):
    """Outcome of a suitability sweep"""
    SUITABLE = "suitable"
    NOT_CONVERGED = "not-converged"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True, eq=False)
class Eigenpair:
    """
    One nonzero eigenpair of the decoherence matrix.

    The eigenvector is stored sparsely: ``support`` holds the PathIndex
    values with final site ``site`` and ``vector`` the unit-norm entries
    on them.
    """
    site: int
    eigenvalue: float
    support: np.ndarray
    vector: np.ndarray

    def dense(self, size: int) -> np.ndarray:
        """Eigenvector as a dense vector over Omega_n"""
        out = np.zeros(size, dtype=complex)
        out[self.support] = self.vector
        return out


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenvalues per final site plus the eigenpairs that are present"""
    m: int
    rank: int
    eigenvalues: np.ndarray
    eigenpairs: List[Eigenpair] = field(default_factory=list)

    @property
    def eigenvalue_sum(self) -> float:
        return float(np.sum(self.eigenvalues))

    def pair(self, site: int) -> Optional[Eigenpair]:
        """Eigenpair for final site ``site`` or None when it is absent"""
        for pair in self.eigenpairs:
            if pair.site == site:
                return pair
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "rank": self.rank,
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "eigenvalue_sum": self.eigenvalue_sum,
            "eigenpairs": [
                {
                    "site": p.site,
                    "eigenvalue": float(p.eigenvalue),
                    "support_size": int(p.support.size),
                    "support": [int(i) for i in p.support],
                    "vector": [complex_to_json(z) for z in p.vector],
                }
                for p in self.eigenpairs
            ],
        }


@dataclass
class SuitabilityReport:
    """Trace of local expectations over a rank window and its verdict"""
    family: str
    ranks: List[int]
    values: List[float]
    verdict: Verdict
    window: int
    tol: float
    limit: Optional[float] = None
    truncated_at: Optional[int] = None  # rank where the enumeration budget stopped the sweep

    @property
    def suitable(self) -> bool:
        return self.verdict == Verdict.SUITABLE

    @property
    def trailing_spread(self) -> Optional[float]:
        """Max pairwise spread of the trailing window (None if too short)"""
        if len(self.values) < self.window:
            return None
        tail = self.values[-self.window:]
        return spread(tail)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family,
            "ranks": list(self.ranks),
            "values": [float(v) for v in self.values],
            "verdict": self.verdict.value,
            "limit": self.limit,
            "window": self.window,
            "tol": self.tol,
            "trailing_spread": self.trailing_spread,
            "truncated_at": self.truncated_at,
        }


@dataclass
class ConsistencyReport:
    """Residual of the rank t / rank t+1 marginalization identity"""
    rank: int
    pairs_checked: int
    max_residual: float
    tol: float
    exhaustive: bool

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "pairs_checked": self.pairs_checked,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "exhaustive": self.exhaustive,
            "passed": self.passed,
        }
