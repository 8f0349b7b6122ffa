"""
Decoherence matrices D_n in grouped-amplitude form, the decoherence functional,
q-measures, position distributions and the exact rank <= m spectrum
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .core.config import QProcConfig
from .core.utils import clamp_nonnegative
from .exceptions import BudgetExceededError, NormalizationError, RankMismatchError
from .models.path import CylinderEvent
from .models.reports import Eigenpair, SpectralDecomposition
from .pathspace import index_range
from .unitary.amplitudes import all_amplitudes, class_operator
from .unitary.base import FiniteUnitarySystem, InitialState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DecoherenceState:
    """
    D_n stored as the amplitude vector over the path space plus final sites.

    D(g, g') = a(g) conj(a(g')) when g_n = g'_n and 0 otherwise, so the
    amplitudes grouped by final site carry the whole matrix. Indices
    outside [offset, offset + len(amplitudes)) have amplitude 0.
    """
    m: int
    rank: int
    amplitudes: np.ndarray
    final_sites: np.ndarray
    offset: int = 0
    fixed_initial_site: Optional[int] = None
    clamp_tol: float = 1e-12

    @property
    def space_size(self) -> int:
        """|Omega_n| including paths outside a fixed-initial-site block"""
        return self.m ** (self.rank + 1)

    @property
    def trace(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def check_event(self, event: CylinderEvent) -> None:
        if event.m != self.m or event.rank != self.rank:
            raise RankMismatchError(
                f"Event (m={event.m}, n={event.rank}) does not match state (m={self.m}, n={self.rank})"
            )

    def local_positions(self, event: CylinderEvent) -> np.ndarray:
        """Positions in ``amplitudes`` of the event members that carry amplitude"""
        self.check_event(event)
        indices = event.indices() - self.offset
        return indices[(indices >= 0) & (indices < self.amplitudes.size)]

    def group_sums(self, event: CylinderEvent) -> np.ndarray:
        """S_A(i) = sum of a(g) over g in A with g_n = i"""
        positions = self.local_positions(event)
        return _grouped(self.amplitudes[positions], self.final_sites[positions], self.m)

    def weighted_group_sums(self, weights: np.ndarray) -> np.ndarray:
        """sum of a(g) w(g) by final site, for w aligned with ``amplitudes``"""
        return _grouped(self.amplitudes * weights, self.final_sites, self.m)

    def full_amplitudes(self) -> np.ndarray:
        """Amplitude vector over all of Omega_n"""
        out = np.zeros(self.space_size, dtype=complex)
        out[self.offset:self.offset + self.amplitudes.size] = self.amplitudes
        return out


def _grouped(values: np.ndarray, sites: np.ndarray, m: int) -> np.ndarray:
    """Complex bincount of values by site"""
    real = np.bincount(sites, weights=values.real, minlength=m)
    imag = np.bincount(sites, weights=values.imag, minlength=m)
    return real + 1j * imag


def build_decoherence(system: FiniteUnitarySystem, psi: InitialState, n: int,
                      fixed_initial_site: Optional[int] = None,
                      config: Optional[QProcConfig] = None) -> DecoherenceState:
    """
    Build the rank-n decoherence state

    Args:
        system: Unitary system
        psi: Initial state (must be e_s up to phase when the initial site s is fixed)
        n: Rank
        fixed_initial_site: Optional fixed g_0
        config: Budgets and tolerances

    Returns:
        DecoherenceState with unit trace

    Raises:
        BudgetExceededError: If the path space is above the enumeration cap
        NormalizationError: If psi is not normalized or the trace drifts from 1
    """
    config = config or system.config
    if fixed_initial_site is not None:
        weight = abs(psi.psi[fixed_initial_site]) if 0 <= fixed_initial_site < psi.m else 0.0
        if abs(weight - 1.0) > config.normalization_tol:
            raise NormalizationError(
                f"With initial site fixed to {fixed_initial_site} the state must be "
                f"e_{fixed_initial_site} up to phase, |psi({fixed_initial_site})| = {weight!r}"
            )

    amplitudes, final_sites = all_amplitudes(system, psi, n, fixed_initial_site, config)
    start, _ = index_range(system.m, n, fixed_initial_site)
    state = DecoherenceState(
        m=system.m,
        rank=n,
        amplitudes=amplitudes,
        final_sites=final_sites,
        offset=start,
        fixed_initial_site=fixed_initial_site,
        clamp_tol=config.clamp_tol,
    )

    # Unitary steps preserve |psi|^2, which InitialState only pins to within its own tolerance
    trace = state.trace
    expected = float(np.vdot(psi.psi, psi.psi).real)
    if abs(trace - expected) > max(config.normalization_tol, 1e-12 * (n + 1)):
        raise NormalizationError(f"Decoherence matrix at rank {n} has trace {trace!r}, expected {expected!r}")

    logger.info(f"Built decoherence state for m={system.m}, n={n} over {amplitudes.size} paths")
    return state


def decoherence_functional(state: DecoherenceState, a: CylinderEvent, b: CylinderEvent) -> complex:
    """D_n(A, B) = sum over g in A, g' in B of a(g) conj(a(g')) delta(g_n, g'_n)"""
    return complex(np.sum(state.group_sums(a) * np.conj(state.group_sums(b))))


def class_functional(system: FiniteUnitarySystem, psi: InitialState, a: CylinderEvent,
                     b: CylinderEvent) -> complex:
    """D_n(A, B) through class operators: <C_n(A) psi, C_n(B) psi> (linear in the first slot)"""
    left = class_operator(system, a) @ psi.psi
    right = class_operator(system, b) @ psi.psi
    return complex(np.vdot(right, left))


def q_measure(state: DecoherenceState, event: CylinderEvent) -> float:
    """mu_n(A) = sum_i |S_A(i)|^2, clamped at zero within tolerance"""
    sums = state.group_sums(event)
    return clamp_nonnegative(float(np.sum(np.abs(sums) ** 2)), state.clamp_tol)


def weighted_q_measure(state: DecoherenceState, weights: np.ndarray) -> float:
    """<D_n w, w> for a real weight vector aligned with the stored amplitudes"""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != state.amplitudes.shape:
        raise RankMismatchError(
            f"Weight vector has shape {weights.shape}, state stores {state.amplitudes.shape}"
        )
    sums = state.weighted_group_sums(weights)
    return clamp_nonnegative(float(np.sum(np.abs(sums) ** 2)), state.clamp_tol)


def gram_matrix(state: DecoherenceState, events: Sequence[CylinderEvent]) -> np.ndarray:
    """k x k matrix D_n(A_i, A_j)"""
    sums = np.vstack([state.group_sums(e) for e in events])
    return sums @ sums.conj().T


def position_distribution(state: DecoherenceState) -> np.ndarray:
    """p_n(i) = |sum over g_n = i of a(g)|^2"""
    return np.abs(state.weighted_group_sums(np.ones(state.amplitudes.size))) ** 2


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate so the first significant entry is real positive"""
    magnitudes = np.abs(vector)
    significant = np.flatnonzero(magnitudes > 1e-9 * magnitudes.max())
    lead = vector[significant[0]]
    return vector * (abs(lead) / lead)


def spectrum(state: DecoherenceState) -> SpectralDecomposition:
    """
    Exact eigen-decomposition of D_n.

    Eigenvalue i is the weight of paths ending at site i; its eigenvector is
    the amplitude vector restricted to those paths and normalized. Sites
    whose restriction vanishes have no eigenpair.
    """
    probs = np.abs(state.amplitudes) ** 2
    eigenvalues = np.bincount(state.final_sites, weights=probs, minlength=state.m)
    eigenvalues = np.array([clamp_nonnegative(float(v), state.clamp_tol) for v in eigenvalues])

    pairs: List[Eigenpair] = []
    for site in range(state.m):
        if eigenvalues[site] <= state.clamp_tol:
            continue
        positions = np.flatnonzero(state.final_sites == site)
        vector = state.amplitudes[positions] / np.sqrt(eigenvalues[site])
        pairs.append(Eigenpair(
            site=site,
            eigenvalue=float(eigenvalues[site]),
            support=positions.astype(np.int64) + state.offset,
            vector=_fix_phase(vector),
        ))

    logger.debug(f"Rank {state.rank} spectrum: {eigenvalues.tolist()}")
    return SpectralDecomposition(m=state.m, rank=state.rank, eigenvalues=eigenvalues, eigenpairs=pairs)


def q_measure_spectral(state: DecoherenceState, event: CylinderEvent,
                       decomposition: Optional[SpectralDecomposition] = None) -> float:
    """mu_n(A) = sum_i lambda_i |sum over g in A of <chi_g, v_i>|^2"""
    state.check_event(event)
    decomposition = decomposition or spectrum(state)
    members = event.mask()
    total = 0.0
    for pair in decomposition.eigenpairs:
        overlap = np.sum(pair.vector[members[pair.support]])
        total += pair.eigenvalue * abs(overlap) ** 2
    return clamp_nonnegative(float(total), state.clamp_tol)


def dense_matrix(state: DecoherenceState, config: Optional[QProcConfig] = None) -> np.ndarray:
    """
    Materialize D_n as a |Omega_n| x |Omega_n| matrix

    Raises:
        BudgetExceededError: If |Omega_n| is above the dense cap
    """
    config = config or QProcConfig()
    size = state.space_size
    if size > config.dense_cap:
        raise BudgetExceededError(
            f"Dense decoherence matrix for m={state.m}, n={state.rank} needs {size} rows, "
            f"above the dense cap {config.dense_cap}",
            m=state.m, n=state.rank, cap=config.dense_cap,
        )
    amplitudes = state.full_amplitudes()
    finals = np.arange(size, dtype=np.int64) % state.m
    same_final = finals[:, None] == finals[None, :]
    return np.outer(amplitudes, amplitudes.conj()) * same_final
