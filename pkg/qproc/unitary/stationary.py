"""
Stationary systems: U(s, r) = U^(s-r)
"""

import logging
from typing import Optional

import numpy as np

from .base import FiniteUnitarySystem, check_unitary
from ..core.config import QProcConfig
from ..exceptions import PropagatorError

logger = logging.getLogger(__name__)


class StationarySystem(FiniteUnitarySystem):
    """Time-homogeneous system driven by a single unitary U"""

    def __init__(self, matrix: np.ndarray, config: Optional[QProcConfig] = None):
        config = config or QProcConfig()
        matrix = check_unitary(matrix, config.unitarity_tol, "Stationary unitary")
        super().__init__(matrix.shape[0], config)
        self.matrix = matrix
        logger.info(f"Built stationary system on {self.m} sites")

    @property
    def stationary(self) -> bool:
        return True

    @property
    def horizon(self) -> Optional[int]:
        return None

    def _step(self, n: int) -> np.ndarray:
        return self.matrix

    def propagator(self, s: int, r: int) -> np.ndarray:
        if r > s:
            raise PropagatorError(f"Propagator U({s},{r}) needs r <= s")
        if r < 0:
            raise PropagatorError(f"Propagator times must be nonnegative, got r={r}")
        return np.linalg.matrix_power(self.matrix, s - r)
