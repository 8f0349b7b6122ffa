"""
Path models: n-paths, their canonical base-m index, and cylinder events
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

# Events with more members than this are stored as bitmaps
BITMAP_THRESHOLD = 2 ** 16


def encode_path(sites: Sequence[int], m: int) -> int:
    """Encode sites g0..gn as a base-m integer with g0 the most significant digit"""
    value = 0
    for site in sites:
        value = value * m + int(site)
    return value


def decode_index(value: int, m: int, n: int) -> Tuple[int, ...]:
    """Decode a base-m path index of rank n back into its n+1 sites"""
    digits = []
    for _ in range(n + 1):
        value, digit = divmod(value, m)
        digits.append(digit)
    return tuple(reversed(digits))


def encode_digits(digits: np.ndarray, m: int) -> np.ndarray:
    """Vectorized ``encode_path`` over the rows of a (N, n+1) digit array"""
    digits = np.asarray(digits, dtype=np.int64)
    weights = m ** np.arange(digits.shape[1] - 1, -1, -1, dtype=np.int64)
    return digits @ weights


@dataclass(frozen=True)
class NPath:
    """An n-path g0 g1 ... gn over m sites"""
    sites: Tuple[int, ...]
    m: int

    def __post_init__(self):
        """Validate path data"""
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        if self.m < 1:
            raise ValueError("Site count must be positive")
        if not self.sites:
            raise ValueError("A path has at least one site")
        if any(s < 0 or s >= self.m for s in self.sites):
            raise ValueError(f"Path {self.sites} has sites outside 0..{self.m - 1}")

    @property
    def rank(self) -> int:
        """Path length minus one"""
        return len(self.sites) - 1

    @property
    def index(self) -> int:
        """Canonical PathIndex value"""
        return encode_path(self.sites, self.m)

    @property
    def initial_site(self) -> int:
        return self.sites[0]

    @property
    def final_site(self) -> int:
        return self.sites[-1]

    @classmethod
    def from_index(cls, value: int, m: int, n: int) -> 'NPath':
        """Build the path with the given PathIndex"""
        if value < 0 or value >= m ** (n + 1):
            raise ValueError(f"Index {value} outside [0, {m}^{n + 1})")
        return cls(decode_index(value, m, n), m)

    def prefix(self, rank: int) -> 'NPath':
        """The first rank+1 sites"""
        if rank < 0 or rank > self.rank:
            raise ValueError(f"Prefix rank {rank} outside 0..{self.rank}")
        return NPath(self.sites[:rank + 1], self.m)

    def extend(self, site: int) -> 'NPath':
        """Append one site"""
        return NPath(self.sites + (site,), self.m)

    def __len__(self) -> int:
        return len(self.sites)

    def __str__(self) -> str:
        if self.m <= 10:
            return "".join(str(s) for s in self.sites)
        return ".".join(str(s) for s in self.sites)


@dataclass(frozen=True)
class PathIndex:
    """Base-m integer encoding of an n-path"""
    value: int
    m: int
    n: int

    def __post_init__(self):
        if self.value < 0 or self.value >= self.m ** (self.n + 1):
            raise ValueError(f"Index {self.value} outside [0, {self.m}^{self.n + 1})")

    def to_path(self) -> NPath:
        return NPath.from_index(self.value, self.m, self.n)

    @classmethod
    def of(cls, path: NPath) -> 'PathIndex':
        return cls(path.index, path.m, path.rank)

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True, eq=False)
class CylinderEvent:
    """
    An n-event: a subset of Omega_n.

    Members are kept as a sorted index array while small and as a bitmap
    over Omega_n once they pass BITMAP_THRESHOLD.
    """
    m: int
    rank: int
    _indices: Optional[np.ndarray] = field(default=None, repr=False)
    _mask: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        """Validate event data"""
        if self.m < 1 or self.rank < 0:
            raise ValueError("Event needs m >= 1 and rank >= 0")
        if (self._indices is None) == (self._mask is None):
            raise ValueError("Event needs exactly one of indices or mask")
        if self._mask is not None and self._mask.shape != (self.space_size,):
            raise ValueError(f"Mask must have length {self.space_size}")
        if self._indices is not None and self._indices.size:
            if self._indices[0] < 0 or self._indices[-1] >= self.space_size:
                raise ValueError(f"Event members must lie in [0, {self.space_size})")

    # Construction

    @classmethod
    def from_indices(cls, m: int, rank: int, indices: Iterable[int]) -> 'CylinderEvent':
        """Build an event from PathIndex values (duplicates are merged)"""
        members = np.unique(np.fromiter((int(i) for i in indices), dtype=np.int64))
        return cls._from_sorted(m, rank, members)

    @classmethod
    def from_paths(cls, paths: Sequence[NPath]) -> 'CylinderEvent':
        """Build an event from paths sharing m and rank"""
        if not paths:
            raise ValueError("Use CylinderEvent.empty for the empty event")
        m, rank = paths[0].m, paths[0].rank
        if any(p.m != m or p.rank != rank for p in paths):
            raise ValueError("All paths of an event must share m and rank")
        return cls.from_indices(m, rank, (p.index for p in paths))

    @classmethod
    def from_mask(cls, m: int, rank: int, mask: np.ndarray) -> 'CylinderEvent':
        """Build an event from a boolean vector over Omega_n"""
        mask = np.asarray(mask, dtype=bool)
        if int(mask.sum()) > BITMAP_THRESHOLD:
            return cls(m, rank, _mask=mask.copy())
        return cls(m, rank, _indices=np.flatnonzero(mask).astype(np.int64))

    @classmethod
    def empty(cls, m: int, rank: int) -> 'CylinderEvent':
        return cls(m, rank, _indices=np.zeros(0, dtype=np.int64))

    @classmethod
    def full(cls, m: int, rank: int, fixed_initial_site: Optional[int] = None) -> 'CylinderEvent':
        """Omega_n, or the block {s} x S^n when the initial site is fixed"""
        size = m ** (rank + 1)
        if fixed_initial_site is None:
            return cls._from_sorted(m, rank, np.arange(size, dtype=np.int64))
        block = m ** rank
        start = fixed_initial_site * block
        return cls._from_sorted(m, rank, np.arange(start, start + block, dtype=np.int64))

    @classmethod
    def _from_sorted(cls, m: int, rank: int, members: np.ndarray) -> 'CylinderEvent':
        if members.size > BITMAP_THRESHOLD:
            mask = np.zeros(m ** (rank + 1), dtype=bool)
            mask[members] = True
            return cls(m, rank, _mask=mask)
        return cls(m, rank, _indices=members)

    # Views

    @property
    def space_size(self) -> int:
        """|Omega_n| = m^(n+1)"""
        return self.m ** (self.rank + 1)

    @property
    def is_bitmap(self) -> bool:
        return self._mask is not None

    def indices(self) -> np.ndarray:
        """Sorted member indices"""
        if self._mask is not None:
            return np.flatnonzero(self._mask).astype(np.int64)
        return self._indices

    def mask(self) -> np.ndarray:
        """Boolean membership vector over Omega_n"""
        if self._mask is not None:
            return self._mask
        mask = np.zeros(self.space_size, dtype=bool)
        mask[self._indices] = True
        return mask

    def paths(self) -> List[NPath]:
        return [NPath.from_index(int(i), self.m, self.rank) for i in self.indices()]

    def __len__(self) -> int:
        if self._mask is not None:
            return int(self._mask.sum())
        return int(self._indices.size)

    def __contains__(self, item: Union[int, NPath]) -> bool:
        value = item.index if isinstance(item, NPath) else int(item)
        if value < 0 or value >= self.space_size:
            return False
        if self._mask is not None:
            return bool(self._mask[value])
        pos = np.searchsorted(self._indices, value)
        return bool(pos < self._indices.size and self._indices[pos] == value)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CylinderEvent):
            return NotImplemented
        return (self.m == other.m and self.rank == other.rank
                and np.array_equal(self.indices(), other.indices()))

    def __hash__(self) -> int:
        return hash((self.m, self.rank, len(self)))

    def __repr__(self) -> str:
        return f"CylinderEvent(m={self.m}, rank={self.rank}, size={len(self)})"

    # Algebra

    def _check_compatible(self, other: 'CylinderEvent') -> None:
        if self.m != other.m or self.rank != other.rank:
            raise ValueError(
                f"Events live in different path spaces: (m={self.m}, n={self.rank}) "
                f"vs (m={other.m}, n={other.rank})"
            )

    def union(self, other: 'CylinderEvent') -> 'CylinderEvent':
        self._check_compatible(other)
        return self._from_sorted(self.m, self.rank, np.union1d(self.indices(), other.indices()))

    def intersection(self, other: 'CylinderEvent') -> 'CylinderEvent':
        self._check_compatible(other)
        return self._from_sorted(self.m, self.rank, np.intersect1d(self.indices(), other.indices()))

    def difference(self, other: 'CylinderEvent') -> 'CylinderEvent':
        self._check_compatible(other)
        return self._from_sorted(self.m, self.rank, np.setdiff1d(self.indices(), other.indices()))

    def complement(self, fixed_initial_site: Optional[int] = None) -> 'CylinderEvent':
        """Complement inside Omega_n (or inside the fixed-initial-site block)"""
        return CylinderEvent.full(self.m, self.rank, fixed_initial_site).difference(self)

    def is_disjoint(self, other: 'CylinderEvent') -> bool:
        self._check_compatible(other)
        return np.intersect1d(self.indices(), other.indices()).size == 0

    def extend(self, k: int = 1) -> 'CylinderEvent':
        """The same cylinder set viewed at rank n+k (A x S^k)"""
        if k < 0:
            raise ValueError("Extension depth must be nonnegative")
        if k == 0:
            return self
        block = self.m ** k
        members = (self.indices()[:, None] * block + np.arange(block, dtype=np.int64)[None, :]).reshape(-1)
        return self._from_sorted(self.m, self.rank + k, members)

    def classical_measure(self, fixed_initial_site: Optional[int] = None) -> Fraction:
        """
        Uniform product measure nu(A).

        With a fixed initial site the path space is {s} x S x S x ...,
        so only the block of paths starting at s carries weight m^-n.
        """
        if fixed_initial_site is None:
            return Fraction(len(self), self.space_size)
        block = self.m ** self.rank
        start = fixed_initial_site * block
        members = self.indices()
        count = int(np.count_nonzero((members >= start) & (members < start + block)))
        return Fraction(count, block)
