"""
Utility helpers
"""

from .parallel import ordered_map, partition_range

__all__ = ["ordered_map", "partition_range"]
