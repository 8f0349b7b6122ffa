"""
Finite unitary systems, propagators, amplitudes and class operators
"""

from .base import FiniteUnitarySystem, InitialState, check_unitary, unitarity_deviation
from .stationary import StationarySystem
from .stepped import SteppedSystem
from .factory import (
    create_system,
    get_available_presets,
    two_site_walk,
    is_two_site_walk,
    random_unitary,
    random_system,
    random_state,
)
from .amplitudes import (
    path_weight,
    amplitude,
    all_amplitudes,
    path_weights,
    weights_of,
    class_operator,
    weight_norms,
)

__all__ = [
    "FiniteUnitarySystem",
    "InitialState",
    "check_unitary",
    "unitarity_deviation",
    "StationarySystem",
    "SteppedSystem",
    "create_system",
    "get_available_presets",
    "two_site_walk",
    "is_two_site_walk",
    "random_unitary",
    "random_system",
    "random_state",
    "path_weight",
    "amplitude",
    "all_amplitudes",
    "path_weights",
    "weights_of",
    "class_operator",
    "weight_norms",
]
