"""
Thread-pool helpers with deterministic, index-ordered results
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, Tuple, TypeVar

T = TypeVar('T')
R = TypeVar('R')

logger = logging.getLogger(__name__)


def partition_range(start: int, stop: int, parts: int) -> List[Tuple[int, int]]:
    """
    Split [start, stop) into at most ``parts`` contiguous chunks

    Args:
        start: First index
        stop: One past the last index
        parts: Desired number of chunks

    Returns:
        List of (lo, hi) pairs in increasing order covering the range
    """
    total = stop - start
    if total <= 0:
        return []
    parts = max(1, min(parts, total))
    base, extra = divmod(total, parts)
    chunks = []
    lo = start
    for k in range(parts):
        hi = lo + base + (1 if k < extra else 0)
        chunks.append((lo, hi))
        lo = hi
    return chunks


def ordered_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """
    Map ``func`` over ``items`` on a thread pool, returning results in input order.

    With one worker (or one item) everything runs in the calling thread.
    Exceptions raised by any call propagate to the caller.
    """
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    logger.debug(f"Dispatching {len(items)} chunks to {workers} worker threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(func, item) for item in items]
        return [future.result() for future in futures]

