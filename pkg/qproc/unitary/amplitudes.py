"""
Path weights b(g), amplitudes a(g) = b(g) psi(g_0) and class operators C_n(A)
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .base import FiniteUnitarySystem, InitialState
from ..core.config import QProcConfig
from ..models.path import CylinderEvent, NPath
from ..pathspace import check_budget
from ..utils.parallel import ordered_map, partition_range

logger = logging.getLogger(__name__)


def path_weight(system: FiniteUnitarySystem, path: NPath) -> complex:
    """b(g) = prod_k <e_(g_k), U(k, k-1) e_(g_(k-1))>; 1 for a rank-0 path"""
    system.check_rank(path.rank)
    weight = 1.0 + 0.0j
    for k in range(1, len(path.sites)):
        weight *= system.step(k - 1)[path.sites[k], path.sites[k - 1]]
    return complex(weight)


def amplitude(system: FiniteUnitarySystem, psi: InitialState, path: NPath) -> complex:
    """a(g) = b(g) psi(g_0)"""
    return path_weight(system, path) * complex(psi.psi[path.sites[0]])


def _extend(system: FiniteUnitarySystem, values: np.ndarray, last: np.ndarray,
            rank_from: int, rank_to: int) -> Tuple[np.ndarray, np.ndarray]:
    """Grow per-path products from rank_from to rank_to, one step at a time"""
    m = system.m
    sites = np.arange(m, dtype=np.int64)
    for t in range(rank_from, rank_to):
        step = system.step(t)
        # child (p, j) gets values[p] * U[j, last[p]]
        values = (values[:, None] * step[:, last].T).reshape(-1)
        last = np.tile(sites, last.size)
    return values, last


def _propagate(system: FiniteUnitarySystem, initial: np.ndarray, n: int,
               fixed_initial_site: Optional[int], config: QProcConfig) -> Tuple[np.ndarray, np.ndarray]:
    """
    Products initial[g_0] * b(g) for every g in the (restricted) rank-n path space.

    Prefix products are reused across children, so each rank costs one
    vectorized multiply. Large spaces are split by PathIndex range across
    worker threads and concatenated in index order.
    """
    m = system.m
    if fixed_initial_site is None:
        values = np.asarray(initial, dtype=complex).copy()
        last = np.arange(m, dtype=np.int64)
    else:
        values = np.array([initial[fixed_initial_site]], dtype=complex)
        last = np.array([fixed_initial_site], dtype=np.int64)

    count = values.size * m ** n
    if config.workers <= 1 or count < config.parallel_threshold or n == 0:
        return _extend(system, values, last, 0, n)

    # Serial prefix up to a rank with at least one block per worker
    split = 0
    while split < n and values.size * m ** split < config.workers:
        split += 1
    values, last = _extend(system, values, last, 0, split)
    chunks = partition_range(0, values.size, config.workers)

    def run(chunk: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
        lo, hi = chunk
        return _extend(system, values[lo:hi], last[lo:hi], split, n)

    results = ordered_map(run, chunks, config.workers)
    return (np.concatenate([r[0] for r in results]),
            np.concatenate([r[1] for r in results]))


def all_amplitudes(system: FiniteUnitarySystem, psi: InitialState, n: int,
                   fixed_initial_site: Optional[int] = None,
                   config: Optional[QProcConfig] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Amplitudes of every rank-n path in increasing PathIndex order

    Args:
        system: Unitary system
        psi: Initial state
        n: Path rank
        fixed_initial_site: Restrict to paths starting at this site
        config: Budgets and worker settings (defaults to ``system.config``)

    Returns:
        (amplitudes, final_sites) over the index range of the path space

    Raises:
        BudgetExceededError: If the path count is above the cap
    """
    config = config or system.config
    if psi.m != system.m:
        raise ValueError(f"State has {psi.m} components, system has {system.m} sites")
    check_budget(system.m, n, config.enumeration_cap, fixed_initial_site)
    system.check_rank(n)
    return _propagate(system, psi.psi, n, fixed_initial_site, config)


def path_weights(system: FiniteUnitarySystem, n: int, fixed_initial_site: Optional[int] = None,
                 config: Optional[QProcConfig] = None) -> Tuple[np.ndarray, np.ndarray]:
    """b(g) for every rank-n path, with final sites"""
    config = config or system.config
    check_budget(system.m, n, config.enumeration_cap, fixed_initial_site)
    system.check_rank(n)
    return _propagate(system, np.ones(system.m, dtype=complex), n, fixed_initial_site, config)


def weights_of(system: FiniteUnitarySystem, event: CylinderEvent) -> np.ndarray:
    """b(g) for the members of an event, in member order"""
    system.check_rank(event.rank)
    indices = event.indices()
    weights = np.ones(indices.size, dtype=complex)
    if indices.size == 0:
        return weights
    powers = system.m ** np.arange(event.rank, -1, -1, dtype=np.int64)
    digits = (indices[:, None] // powers[None, :]) % system.m
    for k in range(1, event.rank + 1):
        weights *= system.step(k - 1)[digits[:, k], digits[:, k - 1]]
    return weights


def class_operator(system: FiniteUnitarySystem, event: CylinderEvent) -> np.ndarray:
    """C_n(A) = sum over g in A of b(g) |e_(g_n)><e_(g_0)|, as an m x m matrix"""
    if event.m != system.m:
        raise ValueError(f"Event has m={event.m}, system has m={system.m}")
    result = np.zeros((system.m, system.m), dtype=complex)
    indices = event.indices()
    if indices.size == 0:
        return result
    weights = weights_of(system, event)
    first = indices // system.m ** event.rank
    final = indices % system.m
    np.add.at(result, (final, first), weights)
    return result


def weight_norms(system: FiniteUnitarySystem, n: int, config: Optional[QProcConfig] = None,
                 fixed_initial_site: Optional[int] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Sums of |b(g)|^2 grouped by initial and by final site.

    Both are identically 1 for a unitary system. With a fixed initial site
    only that block is enumerated: the initial-site sums hold its single
    entry and the final-site sums, which need every initial site, are None.
    """
    weights, final = path_weights(system, n, fixed_initial_site, config)
    probs = np.abs(weights) ** 2
    if fixed_initial_site is not None:
        return np.array([probs.sum()]), None
    first = np.arange(weights.size, dtype=np.int64) // system.m ** n
    by_initial = np.bincount(first, weights=probs, minlength=system.m)
    by_final = np.bincount(final, weights=probs, minlength=system.m)
    return by_initial, by_final
