"""
Base interface for finite unitary systems on C^m
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.config import QProcConfig
from ..exceptions import NormalizationError, PropagatorError, UnitarityError

logger = logging.getLogger(__name__)


def unitarity_deviation(matrix: np.ndarray) -> float:
    """max |U^H U - I| entry"""
    size = matrix.shape[0]
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(size))))


def check_unitary(matrix: np.ndarray, tol: float, label: str = "matrix") -> np.ndarray:
    """
    Validate a square matrix as unitary within ``tol``

    Returns:
        The matrix as a complex array

    Raises:
        UnitarityError: If the deviation exceeds ``tol`` (never renormalized)
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise UnitarityError(f"{label} must be square, got shape {matrix.shape}", deviation=float("inf"))
    deviation = unitarity_deviation(matrix)
    if deviation > tol:
        raise UnitarityError(f"{label} is not unitary: max |U*U - I| = {deviation:.3e} > {tol:.1e}",
                             deviation=deviation)
    return matrix


@dataclass(eq=False)
class InitialState:
    """Unit vector psi in C^m"""
    psi: np.ndarray
    tol: float = 1e-12

    def __post_init__(self):
        """Validate state data"""
        self.psi = np.asarray(self.psi, dtype=complex).reshape(-1)
        if self.psi.size == 0:
            raise NormalizationError("Initial state must have at least one component")
        norm = float(np.linalg.norm(self.psi))
        if abs(norm - 1.0) > self.tol:
            raise NormalizationError(f"Initial state has norm {norm!r}, expected 1 within {self.tol:.1e}")

    @property
    def m(self) -> int:
        return int(self.psi.size)

    @classmethod
    def basis(cls, m: int, site: int) -> 'InitialState':
        """Basis vector e_site"""
        if not 0 <= site < m:
            raise NormalizationError(f"Basis site {site} outside 0..{m - 1}")
        psi = np.zeros(m, dtype=complex)
        psi[site] = 1.0
        return cls(psi)


class FiniteUnitarySystem(ABC):
    """
    A family of one-step unitaries U(n+1, n) on C^m.

    Subclasses supply ``step``; propagators U(s, r) are composed here.
    """

    def __init__(self, m: int, config: Optional[QProcConfig] = None):
        if m < 1:
            raise ValueError("Site count must be positive")
        self.m = m
        self.config = config or QProcConfig()

    @property
    @abstractmethod
    def stationary(self) -> bool:
        """True when every step is the same unitary U"""
        pass

    @property
    @abstractmethod
    def horizon(self) -> Optional[int]:
        """Number of available steps, or None when unbounded"""
        pass

    @abstractmethod
    def _step(self, n: int) -> np.ndarray:
        """Return U(n+1, n) for an in-range n"""
        pass

    def step(self, n: int) -> np.ndarray:
        """
        One-step unitary U(n+1, n)

        Raises:
            PropagatorError: If step n is not available
        """
        if n < 0:
            raise PropagatorError(f"Step index must be nonnegative, got {n}")
        if self.horizon is not None and n >= self.horizon:
            raise PropagatorError(f"Step U({n + 1},{n}) not available: system has {self.horizon} steps")
        return self._step(n)

    def check_rank(self, n: int) -> None:
        """Raise PropagatorError if rank-n paths need steps beyond the horizon"""
        if self.horizon is not None and n > self.horizon:
            raise PropagatorError(f"Rank {n} needs {n} steps, system has {self.horizon}")

    def propagator(self, s: int, r: int) -> np.ndarray:
        """
        Composed propagator U(s, r) = U(s, s-1) ... U(r+1, r)

        Raises:
            PropagatorError: If r > s or steps are missing
        """
        if r > s:
            raise PropagatorError(f"Propagator U({s},{r}) needs r <= s")
        if r < 0:
            raise PropagatorError(f"Propagator times must be nonnegative, got r={r}")
        result = np.eye(self.m, dtype=complex)
        for k in range(r, s):
            result = self.step(k) @ result
        return result

    def evolve(self, psi: InitialState, n: int) -> np.ndarray:
        """U(n, 0) psi"""
        return self.propagator(n, 0) @ psi.psi

    def __repr__(self) -> str:
        return f"{type(self).__name__}(m={self.m}, horizon={self.horizon})"
