"""
qproc Configuration
Numerical budgets and tolerances shared by every module
"""

import os
from dataclasses import dataclass, asdict, fields
from typing import Dict, Any


LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class QProcConfig:
    """qproc configuration with sensible defaults"""

    # Budgets
    enumeration_cap: int = 2 ** 24  # Hard wall for m^(n+1) path enumeration
    dense_cap: int = 4096           # Largest |Omega_n| materialized densely

    # Tolerances
    unitarity_tol: float = 1e-12
    normalization_tol: float = 1e-12
    clamp_tol: float = 1e-12        # q-measure values this close to 0 are reported as 0
    consistency_tol: float = 1e-10

    # Suitability sweeps (trailing-window Cauchy test)
    suitability_window: int = 4
    suitability_tol: float = 1e-9
    suitability_t_max: int = 10

    # Two-site walk
    walk_direct_cap: int = 16

    # Index-range partitioning of amplitude enumeration
    workers: int = 1
    parallel_threshold: int = 2 ** 16

    # Logging
    log_level: str = "WARNING"

    def __post_init__(self):
        """Validate configuration"""
        if self.enumeration_cap < 1:
            raise ValueError("Enumeration cap must be positive")

        if self.dense_cap < 1:
            raise ValueError("Dense cap must be positive")

        for name in ("unitarity_tol", "normalization_tol", "clamp_tol",
                     "consistency_tol", "suitability_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

        if self.suitability_window < 2:
            raise ValueError("Suitability window must be at least 2")

        if self.suitability_t_max < 0 or self.walk_direct_cap < 0:
            raise ValueError("Rank limits must be nonnegative")

        if self.workers < 1:
            raise ValueError("Worker count must be at least 1")

        self.log_level = self.log_level.upper()
        if self.log_level not in LOG_LEVELS:
            raise ValueError(f"Unknown log level: {self.log_level}")

    @classmethod
    def from_dict(cls, config_dict: Dict[str, Any]) -> 'QProcConfig':
        """Create config from dictionary, rejecting unknown keys"""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(config_dict) - known)
        if unknown:
            raise ValueError(f"Unknown settings: {unknown}")
        return cls(**config_dict)

    @classmethod
    def from_env(cls) -> 'QProcConfig':
        """Create config from environment variables"""
        config_dict = {}

        env_mapping = {
            'QPROC_ENUMERATION_CAP': ('enumeration_cap', int),
            'QPROC_DENSE_CAP': ('dense_cap', int),
            'QPROC_WORKERS': ('workers', int),
            'QPROC_SUITABILITY_TOL': ('suitability_tol', float),
            'QPROC_LOG_LEVEL': ('log_level', str),
        }

        for env_var, (config_field, convert) in env_mapping.items():
            value = os.getenv(env_var)
            if value is not None:
                config_dict[config_field] = convert(value)

        return cls(**config_dict)

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary for JSON serialization"""
        return asdict(self)

    def merged(self, overrides: Dict[str, Any]) -> 'QProcConfig':
        """Return a copy with the given fields replaced"""
        data = self.to_dict()
        data.update(overrides)
        return self.from_dict(data)
