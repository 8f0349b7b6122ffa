"""
Core utility functions for qproc
"""

import math
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Union

import numpy as np

from ..exceptions import ConfigurationError


def parse_complex(value: Any) -> complex:
    """
    Parse a JSON complex number.

    Complex numbers travel as ``[re, im]`` pairs; a bare real number is
    accepted as a purely real entry.

    Args:
        value: ``[re, im]`` pair or real number

    Returns:
        Python complex
    """
    if isinstance(value, bool):
        raise ConfigurationError(f"Not a complex number: {value!r}")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in (re, im)):
            return complex(float(re), float(im))
    raise ConfigurationError(f"Complex numbers must be [re, im] pairs, got {value!r}")


def parse_complex_vector(value: Any) -> np.ndarray:
    """Parse a list of ``[re, im]`` pairs into a complex vector"""
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigurationError("Vector must be a non-empty list")
    return np.array([parse_complex(x) for x in value], dtype=complex)


def parse_complex_matrix(value: Any, scale: float = 1.0) -> np.ndarray:
    """Parse a row-major list of rows of ``[re, im]`` pairs into a square matrix"""
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigurationError("Matrix must be a non-empty list of rows")
    rows = [parse_complex_vector(row) for row in value]
    size = len(rows)
    if any(len(row) != size for row in rows):
        raise ConfigurationError(f"Matrix must be square, got {size} rows of lengths {[len(r) for r in rows]}")
    return scale * np.vstack(rows)


def complex_to_json(value: complex) -> List[float]:
    """Serialize a complex number as ``[re, im]``"""
    value = complex(value)
    return [float(value.real), float(value.imag)]


def fraction_to_json(value: Optional[Fraction]) -> Optional[str]:
    """Serialize an exact rational as ``"p/q"`` (or ``"p"`` for integers)"""
    if value is None:
        return None
    return str(value)


def format_float(value: Union[float, int, None]) -> str:
    """Full-precision float text (17 significant digits) for golden output"""
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".17g")


def clamp_nonnegative(value: float, tol: float) -> float:
    """Clamp values within ``tol`` below zero to exactly zero"""
    if -tol <= value < 0.0:
        return 0.0
    return value


def spread(values: Sequence[float]) -> float:
    """Largest pairwise difference of a sequence (max - min)"""
    if not values:
        return 0.0
    return float(max(values) - min(values))
