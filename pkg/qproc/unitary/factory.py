"""
System factory: builds unitary systems from config specs, presets and RNGs
"""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from .base import FiniteUnitarySystem, InitialState
from .stationary import StationarySystem
from .stepped import SteppedSystem
from ..core.config import QProcConfig
from ..core.utils import parse_complex_matrix
from ..exceptions import ConfigurationError

logger = logging.getLogger(__name__)

WALK_MATRIX = np.array([[1.0, 1.0j], [1.0j, 1.0]], dtype=complex) / np.sqrt(2.0)

SYSTEM_KEYS = {"m", "stationary", "steps", "scale", "preset"}


def create_system(spec: Dict[str, Any], config: Optional[QProcConfig] = None) -> FiniteUnitarySystem:
    """
    Create a unitary system from a config block

    Args:
        spec: ``{"m": int, "stationary": matrix}`` or ``{"m": int, "steps": [matrix, ...]}``
            with optional ``"scale"`` multiplying every entry, or
            ``{"preset": "two-site-walk"}``
        config: Shared tolerances

    Returns:
        Configured system instance

    Raises:
        ConfigurationError: If the block is malformed
        UnitarityError: If a matrix fails the unitarity check
    """
    config = config or QProcConfig()
    if not isinstance(spec, dict):
        raise ConfigurationError("System block must be an object")

    unknown = sorted(set(spec) - SYSTEM_KEYS)
    if unknown:
        raise ConfigurationError(f"Unknown system keys: {unknown}")

    if "preset" in spec:
        if spec["preset"] != "two-site-walk":
            raise ConfigurationError(f"Unsupported system preset: {spec['preset']}")
        return two_site_walk(config)

    scale = spec.get("scale", 1.0)
    if isinstance(scale, bool) or not isinstance(scale, (int, float)):
        raise ConfigurationError(f"System scale must be a number, got {scale!r}")

    has_stationary = "stationary" in spec
    has_steps = "steps" in spec
    if has_stationary == has_steps:
        raise ConfigurationError("System needs exactly one of 'stationary' or 'steps'")

    if has_stationary:
        matrices = [parse_complex_matrix(spec["stationary"], float(scale))]
    else:
        if not isinstance(spec["steps"], list) or not spec["steps"]:
            raise ConfigurationError("'steps' must be a non-empty list of matrices")
        matrices = [parse_complex_matrix(u, float(scale)) for u in spec["steps"]]

    m = spec.get("m", matrices[0].shape[0])
    if isinstance(m, bool) or not isinstance(m, int) or m < 1:
        raise ConfigurationError(f"System 'm' must be a positive integer, got {m!r}")
    for k, matrix in enumerate(matrices):
        if matrix.shape[0] != m:
            raise ConfigurationError(f"Matrix {k} is {matrix.shape[0]}x{matrix.shape[0]}, expected m={m}")

    if has_stationary:
        return StationarySystem(matrices[0], config)
    return SteppedSystem(matrices, config)


def get_available_presets() -> List[str]:
    """Names accepted by ``{"preset": ...}``"""
    return ["two-site-walk"]


def two_site_walk(config: Optional[QProcConfig] = None) -> StationarySystem:
    """Stationary two-site walk U = (1/sqrt 2) [[1, i], [i, 1]]"""
    return StationarySystem(WALK_MATRIX, config)


def is_two_site_walk(system: FiniteUnitarySystem, psi: InitialState, tol: float = 1e-12) -> bool:
    """True for the stationary two-site walk started in e_0 (up to a global phase)"""
    if system.m != 2 or not system.stationary:
        return False
    if not np.allclose(system.step(0), WALK_MATRIX, rtol=0.0, atol=tol):
        return False
    return abs(abs(psi.psi[0]) - 1.0) <= tol


def random_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary by QR of a complex Gaussian matrix with the phase fix"""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def random_system(m: int, steps: int, rng: np.random.Generator, stationary: bool = False,
                  config: Optional[QProcConfig] = None) -> FiniteUnitarySystem:
    """Random stationary system, or a stepped one with ``steps`` independent unitaries"""
    if stationary:
        return StationarySystem(random_unitary(m, rng), config)
    return SteppedSystem([random_unitary(m, rng) for _ in range(steps)], config)


def random_state(m: int, rng: np.random.Generator) -> InitialState:
    """Random unit vector in C^m"""
    psi = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return InitialState(psi / np.linalg.norm(psi))
