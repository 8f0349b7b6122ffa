"""
Discrete quantum processes: consistent local states, local expectations of
event families, suitability sweeps and the extended measure
"""

import logging
import threading
from typing import Callable, Dict, Optional, Union

import numpy as np

from .core.config import QProcConfig
from .core.utils import spread
from .decoherence import DecoherenceState, build_decoherence, q_measure, weighted_q_measure
from .exceptions import BudgetExceededError, DisjointnessError, RankMismatchError
from .families.base import EventFamily
from .families.builtin import CylinderFamily, UnionFamily
from .models.path import CylinderEvent
from .models.reports import ConsistencyReport, SuitabilityReport, Verdict
from .pathspace import index_range, path_count, path_digits
from .unitary.base import FiniteUnitarySystem, InitialState

logger = logging.getLogger(__name__)

EventLike = Union[CylinderEvent, EventFamily]

# Single-site path spaces never grow
SINGLE_SITE_MAX_RANK = 4096


class QProcess:
    """
    A unitary system, an initial state and the rank-indexed decoherence
    states it induces. States and prefix digits are built on first use
    and cached.
    """

    def __init__(self, system: FiniteUnitarySystem, psi: InitialState,
                 fixed_initial_site: Optional[int] = None,
                 config: Optional[QProcConfig] = None):
        self.system = system
        self.psi = psi
        self.fixed_initial_site = fixed_initial_site
        self.config = config or system.config
        self._states: Dict[int, DecoherenceState] = {}
        self._digits: Dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def m(self) -> int:
        return self.system.m

    def max_rank(self) -> int:
        """Deepest rank whose path space fits the enumeration cap and the system horizon"""
        horizon = self.system.horizon
        if self.m == 1:
            return horizon if horizon is not None else SINGLE_SITE_MAX_RANK
        rank = 0
        while path_count(self.m, rank + 1, self.fixed_initial_site) <= self.config.enumeration_cap:
            if horizon is not None and rank + 1 > horizon:
                break
            rank += 1
        return rank

    def state(self, t: int) -> DecoherenceState:
        """Decoherence state at rank t"""
        with self._lock:
            cached = self._states.get(t)
            if cached is None:
                cached = build_decoherence(self.system, self.psi, t, self.fixed_initial_site, self.config)
                self._states[t] = cached
            return cached

    def digits(self, t: int) -> np.ndarray:
        """Site digits of the rank-t paths, aligned with ``state(t).amplitudes``"""
        with self._lock:
            cached = self._digits.get(t)
            if cached is None:
                start, stop = index_range(self.m, t, self.fixed_initial_site)
                cached = path_digits(self.m, t, start, stop)
                self._digits[t] = cached
            return cached

    def q_measure(self, event: CylinderEvent) -> float:
        """mu_n(A) at the event's own rank"""
        return q_measure(self.state(event.rank), event)

    def local_expectation(self, family: EventFamily, t: int) -> float:
        """
        Lambda_t(A) = <D_t w, w> with w(g) the coverage of A on prefix g

        Raises:
            BudgetExceededError: If rank t is above the enumeration cap
        """
        if family.m != self.m:
            raise RankMismatchError(f"Family {family.name} has m={family.m}, process has m={self.m}")
        state = self.state(t)
        weights = family.coverage(t, self.digits(t))
        return weighted_q_measure(state, weights)

    def evaluate_suitability(self, family: EventFamily, t_max: Optional[int] = None,
                             window: Optional[int] = None, tol: Optional[float] = None) -> SuitabilityReport:
        """
        Sweep Lambda_t for t = 0..t_max and apply a trailing-window Cauchy test

        Args:
            family: Event family
            t_max: Deepest rank (defaults to the config; extended so the whole
                window lies at or beyond a cylinder family's native rank)
            window: Number of trailing values compared
            tol: Largest allowed spread inside the window

        Returns:
            SuitabilityReport; a sweep cut short by the enumeration budget
            without converging reports ``budget-exhausted``
        """
        window = window or self.config.suitability_window
        t_max = self.config.suitability_t_max if t_max is None else t_max
        if family.native_rank is not None:
            t_max = max(t_max, family.native_rank + window - 1)
        return self.sweep(family.name, lambda t: self.local_expectation(family, t),
                          start=0, t_max=t_max, window=window, tol=tol)

    def sweep(self, name: str, evaluate: Callable[[int], float], start: int = 0,
              t_max: Optional[int] = None, window: Optional[int] = None,
              tol: Optional[float] = None) -> SuitabilityReport:
        """Evaluate a rank-indexed quantity for t = start..t_max and judge its trailing window"""
        window = window or self.config.suitability_window
        tol = self.config.suitability_tol if tol is None else tol
        t_max = self.config.suitability_t_max if t_max is None else t_max
        if window < 2:
            raise ValueError("Suitability window must be at least 2")
        t_max = max(t_max, start + window - 1)

        limit_rank = self.max_rank()
        ranks, values = [], []
        truncated_at = None
        for t in range(start, t_max + 1):
            try:
                if t > limit_rank:
                    raise BudgetExceededError(f"Rank {t} is beyond rank {limit_rank}",
                                              m=self.m, n=t, cap=self.config.enumeration_cap)
                value = evaluate(t)
            except BudgetExceededError:
                truncated_at = t
                logger.warning(f"Sweep for {name} stopped at rank {t}: enumeration budget")
                break
            logger.debug(f"{name} at rank {t}: {value!r}")
            ranks.append(t)
            values.append(value)

        verdict = Verdict.NOT_CONVERGED
        limit = None
        if len(values) >= window:
            tail = values[-window:]
            if spread(tail) <= tol:
                verdict = Verdict.SUITABLE
                limit = float(np.mean(tail))
        if verdict != Verdict.SUITABLE and truncated_at is not None:
            verdict = Verdict.BUDGET_EXHAUSTED

        logger.info(f"Sweep for {name}: {verdict.value}")
        return SuitabilityReport(
            family=name,
            ranks=ranks,
            values=values,
            verdict=verdict,
            window=window,
            tol=tol,
            limit=limit,
            truncated_at=truncated_at,
        )

    def verify_consistency(self, t: int, samples: int = 1000, seed: int = 0,
                           exhaustive_limit: int = 1024) -> ConsistencyReport:
        """
        Check D_t(g, g') = sum_j D_(t+1)(gj, g'j)

        Every pair is checked when the rank-t space has at most
        ``exhaustive_limit`` paths; otherwise ``samples`` random pairs.
        """
        coarse = self.state(t)
        fine = self.state(t + 1)
        children = fine.amplitudes.reshape(coarse.amplitudes.size, self.m)
        a = coarse.amplitudes
        finals = coarse.final_sites
        size = a.size

        if size <= exhaustive_limit:
            marginal = children @ children.conj().T
            direct = np.outer(a, a.conj()) * (finals[:, None] == finals[None, :])
            residual = float(np.max(np.abs(marginal - direct)))
            pairs = size * size
            exhaustive = True
        else:
            rng = np.random.default_rng(seed)
            p = rng.integers(0, size, samples)
            q = rng.integers(0, size, samples)
            marginal = np.sum(children[p] * children[q].conj(), axis=1)
            direct = a[p] * a[q].conj() * (finals[p] == finals[q])
            residual = float(np.max(np.abs(marginal - direct)))
            pairs = samples
            exhaustive = False

        report = ConsistencyReport(rank=t, pairs_checked=pairs, max_residual=residual,
                                   tol=self.config.consistency_tol, exhaustive=exhaustive)
        logger.info(f"Consistency at rank {t}: max residual {residual:.3e} over {pairs} pairs")
        return report

    def grade2_check(self, a: EventLike, b: EventLike, c: EventLike, t: Optional[int] = None) -> float:
        """
        |mu(ABC) - mu(AB) - mu(AC) - mu(BC) + mu(A) + mu(B) + mu(C)|

        Cylinder events are evaluated at their common rank and must be
        mutually disjoint. Families go through local expectations at rank t
        (disjointness is the caller's responsibility).

        Raises:
            DisjointnessError: If cylinder inputs overlap
            RankMismatchError: If cylinder inputs have different ranks
        """
        if all(isinstance(e, CylinderEvent) for e in (a, b, c)):
            if not (a.rank == b.rank == c.rank):
                raise RankMismatchError(f"Grade-2 events have ranks {a.rank}, {b.rank}, {c.rank}")
            for x, y in ((a, b), (a, c), (b, c)):
                if not x.is_disjoint(y):
                    raise DisjointnessError("Grade-2 check needs mutually disjoint events")
            mu = self.q_measure
            triple = mu(a.union(b).union(c))
            pairs = mu(a.union(b)) + mu(a.union(c)) + mu(b.union(c))
            singles = mu(a) + mu(b) + mu(c)
            return abs(triple - pairs + singles)

        fa, fb, fc = (CylinderFamily(e) if isinstance(e, CylinderEvent) else e for e in (a, b, c))
        if t is None:
            ranks = [f.native_rank for f in (fa, fb, fc) if f.native_rank is not None]
            t = max(ranks) if ranks else self.config.suitability_t_max

        def lam(family: EventFamily) -> float:
            return self.local_expectation(family, t)

        triple = lam(UnionFamily([fa, fb, fc]))
        pairs = lam(UnionFamily([fa, fb])) + lam(UnionFamily([fa, fc])) + lam(UnionFamily([fb, fc]))
        singles = lam(fa) + lam(fb) + lam(fc)
        return abs(triple - pairs + singles)
