"""
Two-site walk: exact Gaussian-integer amplitude sums, the period-4 measure
table and the closed-form decoherence eigenvectors
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .core.utils import complex_to_json, fraction_to_json
from .exceptions import PreconditionError
from .pathspace import flip_count_recursion, position_event
from .process import QProcess
from .unitary.factory import is_two_site_walk

logger = logging.getLogger(__name__)


class GaussianInt:
    """Element a + bi of Z[i]"""

    def __init__(self, a: int, b: int = 0) -> None:
        self._a: int = int(a)
        self._b: int = int(b)

    @property
    def real(self) -> int:
        return self._a

    @property
    def imag(self) -> int:
        return self._b

    def __repr__(self) -> str:
        return f"GaussianInt({self._a}, {self._b})"

    def __str__(self) -> str:
        return f"{self._a}{self._b:+}i"

    @classmethod
    def from_int(cls, x: int) -> 'GaussianInt':
        return cls(x, 0)

    def __complex__(self) -> complex:
        return complex(self._a, self._b)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            return self == self.from_int(other)
        elif isinstance(other, GaussianInt):
            return self._a == other.real and self._b == other.imag
        else:
            return False

    def __hash__(self) -> int:
        return hash((self._a, self._b))

    def __add__(self, other: 'int | GaussianInt') -> 'GaussianInt':
        if isinstance(other, int):
            return self + self.from_int(other)
        elif isinstance(other, GaussianInt):
            return GaussianInt(self._a + other.real, self._b + other.imag)
        else:
            return NotImplemented

    def __radd__(self, other: int) -> 'GaussianInt':
        return self + other

    def __neg__(self) -> 'GaussianInt':
        return GaussianInt(-self._a, -self._b)

    def __sub__(self, other: 'int | GaussianInt') -> 'GaussianInt':
        return self + (-other)

    def __mul__(self, other: 'int | GaussianInt') -> 'GaussianInt':
        if isinstance(other, int):
            return self * self.from_int(other)
        elif isinstance(other, GaussianInt):
            return GaussianInt(self._a * other.real - self._b * other.imag,
                               self._a * other.imag + self._b * other.real)
        else:
            return NotImplemented

    def __rmul__(self, other: int) -> 'GaussianInt':
        return self * other

    def __pow__(self, exponent: int) -> 'GaussianInt':
        if exponent < 0:
            raise ValueError("Z[i] has no inverses beyond the units")
        result = GaussianInt(1, 0)
        base = self
        while exponent > 0:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conj(self) -> 'GaussianInt':
        return GaussianInt(self._a, -self._b)

    def norm(self) -> int:
        """|z|^2"""
        return self._a * self._a + self._b * self._b


I = GaussianInt(0, 1)


def gf_sequence(t_max: int) -> List[Tuple[GaussianInt, GaussianInt]]:
    """
    (G(t), F(t)) for t = 0..t_max from G(t) = G(t-1) + iF(t-1),
    F(t) = F(t-1) + iG(t-1), G(0) = 0, F(0) = 1
    """
    if t_max < 0:
        raise ValueError("t_max must be nonnegative")
    g, f = GaussianInt(0), GaussianInt(1)
    out = [(g, f)]
    for _ in range(t_max):
        g, f = g + I * f, f + I * g
        out.append((g, f))
    return out


_FIRST_PERIOD = gf_sequence(3)


def gf_closed_form(t: int) -> Tuple[GaussianInt, GaussianInt]:
    """G(4k + j) = (-4)^k G(j), and the same for F"""
    if t < 0:
        raise ValueError("t must be nonnegative")
    k, j = divmod(t, 4)
    factor = GaussianInt(-4) ** k
    g, f = _FIRST_PERIOD[j]
    return factor * g, factor * f


def walk_measure_exact(t: int) -> Tuple[Fraction, Fraction]:
    """Exact (mu_t(E_t), mu_t(G_t)) = (|G(t)|^2, |F(t)|^2) / 2^t"""
    g, f = gf_closed_form(t)
    return Fraction(g.norm(), 2 ** t), Fraction(f.norm(), 2 ** t)


@dataclass
class WalkRow:
    """One rank of the walk table; exact columns are None off the two-site walk"""
    t: int
    g: Optional[GaussianInt]
    f: Optional[GaussianInt]
    mu_e: Optional[Fraction]
    mu_g: Optional[Fraction]
    nu_e: Fraction
    direct_mu_e: Optional[float] = None
    direct_mu_g: Optional[float] = None

    @property
    def difference(self) -> Optional[float]:
        """Largest gap between the exact and direct values"""
        if self.mu_e is None or self.direct_mu_e is None:
            return None
        return max(abs(float(self.mu_e) - self.direct_mu_e), abs(float(self.mu_g) - self.direct_mu_g))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "G": complex_to_json(complex(self.g)) if self.g is not None else None,
            "F": complex_to_json(complex(self.f)) if self.f is not None else None,
            "mu_E": fraction_to_json(self.mu_e) if self.mu_e is not None else None,
            "mu_G": fraction_to_json(self.mu_g) if self.mu_g is not None else None,
            "nu_E": fraction_to_json(self.nu_e),
            "direct_mu_E": self.direct_mu_e,
            "direct_mu_G": self.direct_mu_g,
            "difference": self.difference,
        }


@dataclass
class WalkTable:
    """Rows t = 0..t_max"""
    rows: List[WalkRow] = field(default_factory=list)
    exact: bool = True

    @property
    def max_difference(self) -> Optional[float]:
        diffs = [r.difference for r in self.rows if r.difference is not None]
        return max(diffs) if diffs else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "exact": self.exact,
            "max_difference": self.max_difference,
            "rows": [r.to_dict() for r in self.rows],
        }


def _position_measures(process: QProcess, t: int) -> Tuple[float, float]:
    fixed = process.fixed_initial_site
    return (
        process.q_measure(position_event(2, t, t, 1, fixed, process.config)),
        process.q_measure(position_event(2, t, t, 0, fixed, process.config)),
    )


def _classical_position_measure(t: int, fixed_initial_site: Optional[int]) -> Fraction:
    """nu(E_t) for the two-site path space"""
    if t > 0 or fixed_initial_site is None:
        return Fraction(1, 2)
    return Fraction(int(fixed_initial_site == 1))


def walk_table(process: QProcess, t_max: int, direct_cap: Optional[int] = None) -> WalkTable:
    """
    mu_t(E_t) and mu_t(G_t) for t = 0..t_max, with E_t = {g_t = 1} and G_t = {g_t = 0}

    The exact Gaussian-integer columns are filled for the stationary walk
    U = (1/sqrt 2)[[1, i], [i, 1]] started at site 0; direct values come
    from the decoherence state for t up to ``direct_cap`` and the
    enumeration budget.

    Raises:
        PreconditionError: If the process does not have two sites
    """
    if process.m != 2:
        raise PreconditionError(f"Walk table needs a two-site system, got m={process.m}")
    exact = is_two_site_walk(process.system, process.psi, process.config.unitarity_tol)
    if not exact:
        logger.warning("System is not the two-site walk from site 0; exact columns skipped")

    direct_cap = process.config.walk_direct_cap if direct_cap is None else direct_cap
    direct_limit = min(direct_cap, process.max_rank())

    table = WalkTable(exact=exact)
    for t, (g, f) in enumerate(gf_sequence(t_max) if exact else [(None, None)] * (t_max + 1)):
        row = WalkRow(
            t=t,
            g=g,
            f=f,
            mu_e=Fraction(g.norm(), 2 ** t) if exact else None,
            mu_g=Fraction(f.norm(), 2 ** t) if exact else None,
            nu_e=_classical_position_measure(t, process.fixed_initial_site),
        )
        if t <= direct_limit:
            row.direct_mu_e, row.direct_mu_g = _position_measures(process, t)
        logger.debug(f"Walk row {t}: mu_E={row.mu_e} direct={row.direct_mu_e}")
        table.rows.append(row)

    logger.info(f"Walk table to t={t_max}, direct values through t={min(direct_limit, t_max)}")
    return table


def walk_eigenvectors(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Closed-form unit eigenvectors of D_n for the two-site walk from site 0

    Entries are i^c_n(j) / 2^((n-1)/2) on the even local indices (paths
    ending at 0) for the first vector and on the odd ones for the second,
    with c_n the flip counts. Both vectors are indexed by j = 0..2^n - 1.
    """
    if n < 1:
        raise PreconditionError("Walk eigenvectors need n >= 1")
    counts = flip_count_recursion(n)
    values = np.array([1, 1j, -1, -1j])[counts % 4] / 2.0 ** ((n - 1) / 2.0)
    even = np.zeros(2 ** n, dtype=complex)
    odd = np.zeros(2 ** n, dtype=complex)
    even[0::2] = values[0::2]
    odd[1::2] = values[1::2]
    return even, odd
