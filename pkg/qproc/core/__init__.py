"""
Core configuration and utilities
"""

from .config import QProcConfig
from .utils import (
    parse_complex,
    parse_complex_vector,
    parse_complex_matrix,
    complex_to_json,
    fraction_to_json,
    format_float,
    clamp_nonnegative,
    spread,
)

__all__ = [
    "QProcConfig",
    "parse_complex",
    "parse_complex_vector",
    "parse_complex_matrix",
    "complex_to_json",
    "fraction_to_json",
    "format_float",
    "clamp_nonnegative",
    "spread",
]
