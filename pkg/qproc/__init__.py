"""
qproc - Discrete Quantum Process Simulator

Path spaces, decoherence functionals and quantum measures of finite
unitary systems, their extension to limits of cylinder events, and the
min-kernel quantization of random variables.
"""

__version__ = "0.1.0"

from .core.config import QProcConfig
from .exceptions import QProcError
from .models.path import NPath, PathIndex, CylinderEvent
from .models.reports import Verdict, SpectralDecomposition, SuitabilityReport, ConsistencyReport
from .unitary import FiniteUnitarySystem, InitialState, StationarySystem, SteppedSystem, create_system
from .decoherence import DecoherenceState, build_decoherence, q_measure, spectrum
from .process import QProcess
from .families import EventFamily, FamilyFactory

__all__ = [
    "QProcConfig",
    "QProcError",
    "NPath",
    "PathIndex",
    "CylinderEvent",
    "Verdict",
    "SpectralDecomposition",
    "SuitabilityReport",
    "ConsistencyReport",
    "FiniteUnitarySystem",
    "InitialState",
    "StationarySystem",
    "SteppedSystem",
    "create_system",
    "DecoherenceState",
    "build_decoherence",
    "q_measure",
    "spectrum",
    "QProcess",
    "EventFamily",
    "FamilyFactory",
]
