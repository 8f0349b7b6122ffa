"""
Built-in event families with exact coverage functions
"""

import csv
import logging
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .base import EventFamily, FamilyKind
from ..exceptions import ConfigurationError
from ..models.path import CylinderEvent, NPath, encode_digits
from ..pathspace import singleton_event

logger = logging.getLogger(__name__)


def _visited(digits: np.ndarray, site: int, upto: int) -> np.ndarray:
    """True where the prefix occupies ``site`` at some time 0..upto-1"""
    if upto <= 0:
        return np.zeros(digits.shape[0], dtype=bool)
    return np.any(digits[:, :upto] == site, axis=1)


class CylinderFamily(EventFamily):
    """
    A cylinder event A x S x S x ... from an n-event A.

    At ranks below n the coverage is the fraction of extensions that land
    in A; from rank n on it is the 0/1 indicator of the rank-n prefix.
    """

    kind = FamilyKind.CYLINDER

    def __init__(self, event: CylinderEvent, name: Optional[str] = None):
        super().__init__(event.m, name or f"cylinder(n={event.rank}, size={len(event)})")
        self.event = event

    @property
    def native_rank(self) -> Optional[int]:
        return self.event.rank

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        n = self.event.rank
        m = self.m
        if t >= n:
            prefix = encode_digits(digits[:, :n + 1], m)
            return np.isin(prefix, self.event.indices()).astype(float)
        # Count members below each rank-t prefix
        counts = np.bincount(self.event.indices() // m ** (n - t), minlength=m ** (t + 1))
        return counts[encode_digits(digits, m)] / float(m ** (n - t))

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        return self.event.classical_measure(fixed_initial_site)

    def to_event(self, fixed_initial_site: Optional[int] = None) -> Optional[CylinderEvent]:
        return self.event


class PositionFamily(EventFamily):
    """{g : g_time = site}"""

    kind = FamilyKind.CYLINDER

    def __init__(self, m: int, time: int, site: int):
        super().__init__(m, f"position(t={time}, site={site})")
        self.time = time
        self.site = site

    @property
    def native_rank(self) -> Optional[int]:
        return self.time

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        if t >= self.time:
            return (digits[:, self.time] == self.site).astype(float)
        return np.full(digits.shape[0], 1.0 / self.m)

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        if fixed_initial_site is not None and self.time == 0:
            return Fraction(int(fixed_initial_site == self.site))
        return Fraction(1, self.m)


class FirstVisitFamily(EventFamily):
    """B_t: paths that occupy ``site`` for the first time at ``time``"""

    kind = FamilyKind.CYLINDER

    def __init__(self, m: int, site: int, time: int):
        super().__init__(m, f"first-visit(site={site}, t={time})")
        self.site = site
        self.time = time

    @property
    def native_rank(self) -> Optional[int]:
        return self.time

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        m, time = self.m, self.time
        if t >= time:
            hit = ~_visited(digits, self.site, time) & (digits[:, time] == self.site)
            return hit.astype(float)
        # Still clear of the site; remaining steps t+1..time-1 avoid it, step `time` hits it
        clear = ~_visited(digits, self.site, t + 1)
        tail = ((m - 1) / m) ** (time - t - 1) / m
        return clear.astype(float) * tail

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        m, t = self.m, self.time
        if fixed_initial_site is None:
            return Fraction((m - 1) ** t, m ** (t + 1))
        if t == 0:
            return Fraction(int(fixed_initial_site == self.site))
        if fixed_initial_site == self.site:
            return Fraction(0)
        return Fraction((m - 1) ** (t - 1), m ** t)


class AvoidsSiteFamily(EventFamily):
    """Paths that stay off ``site`` at every time 0..time"""

    kind = FamilyKind.CYLINDER

    def __init__(self, m: int, site: int, time: int):
        super().__init__(m, f"avoids-site(site={site}, t={time})")
        self.site = site
        self.time = time

    @property
    def native_rank(self) -> Optional[int]:
        return self.time

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        upto = min(t, self.time) + 1
        clear = (~_visited(digits, self.site, upto)).astype(float)
        if t >= self.time:
            return clear
        return clear * ((self.m - 1) / self.m) ** (self.time - t)

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        m = self.m
        if fixed_initial_site is None:
            return Fraction(m - 1, m) ** (self.time + 1)
        if fixed_initial_site == self.site:
            return Fraction(0)
        return Fraction(m - 1, m) ** self.time


class VisitsSiteFamily(EventFamily):
    """
    Paths that occupy ``site`` at some time.

    Under the uniform product measure a path that has not yet visited the
    site still does so eventually with probability 1, so coverage is 1
    on every prefix.
    """

    kind = FamilyKind.TAIL

    def __init__(self, m: int, site: int):
        super().__init__(m, f"visits-site(site={site})")
        self.site = site

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return np.full(digits.shape[0], float(self.site == 0))
        return np.ones(digits.shape[0])

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        if self.m == 1:
            return Fraction(int(self.site == 0))
        return Fraction(1)


class NeverVisitsSiteFamily(EventFamily):
    """Complement of ``VisitsSiteFamily``: a null set, coverage 0 everywhere"""

    kind = FamilyKind.COMPLEMENT

    def __init__(self, m: int, site: int):
        super().__init__(m, f"never-visits-site(site={site})")
        self.site = site

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        if self.m == 1:
            return np.full(digits.shape[0], float(self.site != 0))
        return np.zeros(digits.shape[0])

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        if self.m == 1:
            return Fraction(int(self.site != 0))
        return Fraction(0)


class CountableFamily(EventFamily):
    """
    A countable set of infinite paths, each given by a finite prefix
    followed by its last site repeated forever.

    Every countable set is nu-null, so coverage is 0 on every prefix.
    """

    kind = FamilyKind.COUNTABLE

    def __init__(self, m: int, prefixes: Sequence[NPath], name: Optional[str] = None):
        super().__init__(m, name or f"countable(size={len(prefixes)})")
        for prefix in prefixes:
            if prefix.m != m:
                raise ValueError(f"Path {prefix} has m={prefix.m}, expected {m}")
        self.prefixes = list(prefixes)

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        return np.zeros(digits.shape[0])

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        return Fraction(0)


class SingletonFamily(CountableFamily):
    """{g} for one infinite path g"""

    def __init__(self, path: NPath):
        super().__init__(path.m, [path], name=f"singleton({path})")
        self.path = path


class ComplementOfCountableFamily(EventFamily):
    """Omega minus a countable set: coverage 1 everywhere"""

    kind = FamilyKind.COMPLEMENT

    def __init__(self, countable: CountableFamily):
        super().__init__(countable.m, f"complement-of({countable.name})")
        self.countable = countable

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        return np.ones(digits.shape[0])

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        return Fraction(1)


class UnionFamily(EventFamily):
    """
    Union of mutually disjoint families; coverages add.

    Disjointness is the caller's responsibility. Sums above 1 are clipped
    and logged since they can only come from overlapping members.
    """

    def __init__(self, members: Sequence[EventFamily], name: Optional[str] = None):
        if not members:
            raise ValueError("Union needs at least one member")
        m = members[0].m
        if any(f.m != m for f in members):
            raise ValueError("Union members must share the site count")
        super().__init__(m, name or "union(" + ", ".join(f.name for f in members) + ")")
        self.members = list(members)
        if all(f.kind == FamilyKind.CYLINDER for f in self.members):
            self.kind = FamilyKind.CYLINDER

    @property
    def native_rank(self) -> Optional[int]:
        ranks = [f.native_rank for f in self.members]
        if any(r is None for r in ranks):
            return None
        return max(ranks)

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        total = np.sum([f.coverage(t, digits) for f in self.members], axis=0)
        excess = float(np.max(total)) - 1.0 if total.size else 0.0
        if excess > 1e-12:
            logger.warning(f"Union {self.name} has coverage above 1 by {excess:.3e} at rank {t}; members overlap")
        return np.clip(total, 0.0, 1.0)

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Optional[Fraction]:
        parts = [f.classical_measure(fixed_initial_site) for f in self.members]
        if any(p is None for p in parts):
            return None
        return sum(parts, Fraction(0))


class CoverageTableFamily(EventFamily):
    """
    Coverage supplied as explicit per-prefix values.

    Ranks above the deepest table inherit the parent value (the event is
    treated as measurable at that rank); ranks below the shallowest table
    average the children.
    """

    def __init__(self, m: int, tables: Dict[int, np.ndarray], name: str = "coverage-table"):
        super().__init__(m, name)
        if not tables:
            raise ConfigurationError("Coverage table is empty")
        for rank, values in tables.items():
            if values.shape != (m ** (rank + 1),):
                raise ConfigurationError(f"Coverage table for rank {rank} must have {m ** (rank + 1)} entries")
            if np.any(values < 0.0) or np.any(values > 1.0):
                raise ConfigurationError(f"Coverage values at rank {rank} must lie in [0, 1]")
        self.tables = dict(tables)
        self.max_rank = max(tables)
        self.min_rank = min(tables)

    def _table(self, t: int) -> np.ndarray:
        if t in self.tables:
            return self.tables[t]
        if t > self.max_rank:
            return np.repeat(self.tables[self.max_rank], self.m ** (t - self.max_rank))
        # Coarsen the nearest finer table
        finer = min(r for r in self.tables if r > t)
        return self.tables[finer].reshape(-1, self.m ** (finer - t)).mean(axis=1)

    def coverage(self, t: int, digits: np.ndarray) -> np.ndarray:
        return self._table(t)[encode_digits(digits, self.m)]

    @classmethod
    def from_rows(cls, m: int, rows: Sequence[Tuple[int, int, float]], name: str = "coverage-table") -> 'CoverageTableFamily':
        """Build from (rank, path_index, coverage) rows; unlisted prefixes have coverage 0"""
        tables: Dict[int, np.ndarray] = {}
        for rank, index, value in rows:
            if rank < 0:
                raise ConfigurationError(f"Negative rank in coverage table: {rank}")
            table = tables.setdefault(rank, np.zeros(m ** (rank + 1)))
            if not 0 <= index < table.size:
                raise ConfigurationError(f"Path index {index} outside [0, {table.size}) at rank {rank}")
            table[index] = value
        return cls(m, tables, name)

    @classmethod
    def from_csv(cls, path: str, m: int) -> 'CoverageTableFamily':
        """Load a CSV with header ``rank,path_index,coverage``"""
        file_path = Path(path)
        if not file_path.exists():
            raise ConfigurationError(f"Coverage table not found: {path}")
        rows: List[Tuple[int, int, float]] = []
        with file_path.open(newline="") as handle:
            reader = csv.DictReader(handle)
            expected = {"rank", "path_index", "coverage"}
            if reader.fieldnames is None or set(reader.fieldnames) != expected:
                raise ConfigurationError(f"Coverage table needs columns {sorted(expected)}, got {reader.fieldnames}")
            for line, row in enumerate(reader, start=2):
                try:
                    rows.append((int(row["rank"]), int(row["path_index"]), float(row["coverage"])))
                except ValueError as e:
                    raise ConfigurationError(f"{path}:{line}: {e}") from e
        logger.info(f"Loaded {len(rows)} coverage rows from {path}")
        return cls.from_rows(m, rows, name=f"coverage-table({file_path.name})")


def prefix_cylinder(path: NPath) -> CylinderFamily:
    """cyl(g) for a finite prefix g"""
    return CylinderFamily(singleton_event(path), name=f"prefix({path})")
