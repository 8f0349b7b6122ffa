"""
Data models for qproc
"""

from .path import NPath, PathIndex, CylinderEvent, encode_path, decode_index, encode_digits
from .reports import (
    Verdict,
    Eigenpair,
    SpectralDecomposition,
    SuitabilityReport,
    ConsistencyReport,
)

__all__ = [
    "NPath",
    "PathIndex",
    "CylinderEvent",
    "encode_path",
    "decode_index",
    "encode_digits",
    "Verdict",
    "Eigenpair",
    "SpectralDecomposition",
    "SuitabilityReport",
    "ConsistencyReport",
]
