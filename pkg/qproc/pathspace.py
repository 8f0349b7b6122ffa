"""
Finite path spaces Omega_n over m sites: enumeration, the uniform product
measure, flip counting for the two-site walk, and cylinder event builders
"""

import logging
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import numpy as np

from .core.config import QProcConfig
from .exceptions import BudgetExceededError, PreconditionError
from .models.path import CylinderEvent, NPath

logger = logging.getLogger(__name__)


def path_count(m: int, n: int, fixed_initial_site: Optional[int] = None) -> int:
    """|Omega_n| = m^(n+1), or m^n when the initial site is fixed"""
    if fixed_initial_site is None:
        return m ** (n + 1)
    return m ** n


def index_range(m: int, n: int, fixed_initial_site: Optional[int] = None) -> Tuple[int, int]:
    """Contiguous PathIndex range [start, stop) of the (possibly restricted) path space"""
    if fixed_initial_site is None:
        return 0, m ** (n + 1)
    if not 0 <= fixed_initial_site < m:
        raise PreconditionError(f"Fixed initial site {fixed_initial_site} outside 0..{m - 1}")
    block = m ** n
    return fixed_initial_site * block, (fixed_initial_site + 1) * block


def check_budget(m: int, n: int, cap: int, fixed_initial_site: Optional[int] = None) -> int:
    """
    Check that a rank-n path space fits the enumeration cap

    Returns:
        Number of paths

    Raises:
        BudgetExceededError: If the path count is above ``cap``
    """
    if m < 1 or n < 0:
        raise PreconditionError(f"Path space needs m >= 1 and n >= 0, got m={m}, n={n}")
    count = path_count(m, n, fixed_initial_site)
    if count > cap:
        raise BudgetExceededError(
            f"Path space m={m}, n={n} has {count} paths, above the enumeration cap {cap}",
            m=m, n=n, cap=cap,
        )
    return count


def path_digits(m: int, n: int, start: int = 0, stop: Optional[int] = None) -> np.ndarray:
    """
    Site digits for a range of path indices

    Args:
        m: Number of sites
        n: Path rank
        start: First PathIndex
        stop: One past the last PathIndex (defaults to m^(n+1))

    Returns:
        Integer array of shape (stop - start, n + 1); column k holds g_k
    """
    if stop is None:
        stop = m ** (n + 1)
    indices = np.arange(start, stop, dtype=np.int64)
    powers = m ** np.arange(n, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % m


def enumerate_paths(m: int, n: int, config: Optional[QProcConfig] = None,
                    fixed_initial_site: Optional[int] = None) -> List[NPath]:
    """
    Materialize Omega_n in increasing PathIndex order

    Raises:
        BudgetExceededError: If m^(n+1) is above the configured cap
    """
    config = config or QProcConfig()
    check_budget(m, n, config.enumeration_cap, fixed_initial_site)
    start, stop = index_range(m, n, fixed_initial_site)
    digits = path_digits(m, n, start, stop)
    logger.debug(f"Enumerated {stop - start} paths for m={m}, n={n}")
    return [NPath(tuple(row), m) for row in digits.tolist()]


def path_measure(m: int, n: int, fixed_initial_site: Optional[int] = None) -> Fraction:
    """nu(cyl(g)) for any rank-n path: m^-(n+1), or m^-n with a fixed initial site"""
    return Fraction(1, path_count(m, n, fixed_initial_site))


# Flip counting (two-site walk)

def flip_count(path: NPath) -> int:
    """Number of position changes |{i : g_i != g_(i+1)}|"""
    sites = path.sites
    return sum(1 for a, b in zip(sites, sites[1:]) if a != b)


def flip_count_vector(n: int) -> np.ndarray:
    """
    Flip counts c_n(j) of the two-site paths 0 j_1 ... j_n, j = 0 .. 2^n - 1

    The free digits j_1..j_n are the binary digits of j, most significant first.
    """
    digits = path_digits(2, n, 0, 2 ** n)
    return np.count_nonzero(digits[:, 1:] != digits[:, :-1], axis=1).astype(np.int64)


def flip_count_reflection(n: int, j: int, m: int = 2) -> Tuple[int, int]:
    """
    Both sides of c_(n+1)(2^(n+1) - 1 - j) = c_n(j) + 1

    Raises:
        PreconditionError: For m != 2 or j outside 0 .. 2^n - 1
    """
    if m != 2:
        raise PreconditionError(f"Flip-count reflection is defined for two sites only, got m={m}")
    if not 0 <= j < 2 ** n:
        raise PreconditionError(f"Index j={j} outside 0..{2 ** n - 1}")
    mirrored = NPath.from_index(2 ** (n + 1) - 1 - j, 2, n + 1)
    original = NPath.from_index(j, 2, n)
    return flip_count(mirrored), flip_count(original) + 1


def flip_count_recursion(n: int) -> np.ndarray:
    """c_n built from c_0 = (0) by c_(k+1) = c_k followed by reversed(c_k + 1)"""
    counts = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        counts = np.concatenate([counts, (counts + 1)[::-1]])
    return counts


# Event builders

def event_where(m: int, n: int, predicate: Callable[[np.ndarray], np.ndarray],
                fixed_initial_site: Optional[int] = None,
                config: Optional[QProcConfig] = None) -> CylinderEvent:
    """
    Build the n-event of paths whose digit rows satisfy ``predicate``

    Args:
        predicate: Maps an (N, n+1) digit array to a length-N bool array
        fixed_initial_site: Restrict members to paths starting at this site
    """
    config = config or QProcConfig()
    check_budget(m, n, config.enumeration_cap, fixed_initial_site)
    start, stop = index_range(m, n, fixed_initial_site)
    keep = np.asarray(predicate(path_digits(m, n, start, stop)), dtype=bool)
    mask = np.zeros(m ** (n + 1), dtype=bool)
    mask[start:stop] = keep
    return CylinderEvent.from_mask(m, n, mask)


def position_event(m: int, n: int, time: int, site: int,
                   fixed_initial_site: Optional[int] = None,
                   config: Optional[QProcConfig] = None) -> CylinderEvent:
    """{g in Omega_n : g_time = site}"""
    if not 0 <= time <= n:
        raise PreconditionError(f"Time {time} outside 0..{n}")
    return event_where(m, n, lambda d: d[:, time] == site, fixed_initial_site, config)


def first_visit_event(m: int, t: int, site: int, n: Optional[int] = None,
                      fixed_initial_site: Optional[int] = None,
                      config: Optional[QProcConfig] = None) -> CylinderEvent:
    """Paths that reach ``site`` for the first time at time t, viewed at rank n >= t"""
    n = t if n is None else n
    if n < t:
        raise PreconditionError(f"Rank {n} is below the visit time {t}")

    def predicate(d: np.ndarray) -> np.ndarray:
        before = np.all(d[:, :t] != site, axis=1) if t > 0 else np.ones(d.shape[0], dtype=bool)
        return before & (d[:, t] == site)

    return event_where(m, n, predicate, fixed_initial_site, config)


def avoids_event(m: int, n: int, site: int, fixed_initial_site: Optional[int] = None,
                 config: Optional[QProcConfig] = None) -> CylinderEvent:
    """Paths that never occupy ``site`` at times 0..n"""
    return event_where(m, n, lambda d: np.all(d != site, axis=1), fixed_initial_site, config)


def singleton_event(path: NPath) -> CylinderEvent:
    return CylinderEvent.from_paths([path])
