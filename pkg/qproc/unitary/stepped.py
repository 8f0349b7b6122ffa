"""
Time-dependent systems given by an explicit list of step matrices
"""

import logging
from typing import Optional, Sequence

import numpy as np

from .base import FiniteUnitarySystem, check_unitary
from ..core.config import QProcConfig

logger = logging.getLogger(__name__)


class SteppedSystem(FiniteUnitarySystem):
    """System whose step n holds U(n+1, n); ranks beyond the list are unavailable"""

    def __init__(self, steps: Sequence[np.ndarray], config: Optional[QProcConfig] = None):
        config = config or QProcConfig()
        if not steps:
            raise ValueError("Stepped system needs at least one step matrix")
        checked = [check_unitary(u, config.unitarity_tol, f"Step U({k + 1},{k})")
                   for k, u in enumerate(steps)]
        size = checked[0].shape[0]
        for k, u in enumerate(checked):
            if u.shape[0] != size:
                raise ValueError(f"Step {k} has dimension {u.shape[0]}, expected {size}")
        super().__init__(size, config)
        self.steps = checked
        logger.info(f"Built stepped system on {self.m} sites with {len(self.steps)} steps")

    @property
    def stationary(self) -> bool:
        return False

    @property
    def horizon(self) -> Optional[int]:
        return len(self.steps)

    def _step(self, n: int) -> np.ndarray:
        return self.steps[n]
