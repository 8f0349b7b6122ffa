"""
Min-kernel quantization of random variables on finite probability spaces,
quantum integrals, the tail-sum formula and two-valued spectra
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .core.config import QProcConfig
from .exceptions import (
    BudgetExceededError,
    DimensionMismatchError,
    DisjointnessError,
    NormalizationError,
    PreconditionError,
)
from .decoherence import DecoherenceState, weighted_q_measure
from .models.reports import SuitabilityReport
from .process import QProcess

logger = logging.getLogger(__name__)

PointSet = Union[Sequence[int], np.ndarray]


@dataclass(eq=False)
class DiscreteMeasureSpace:
    """
    Finite probability space. Zero-weight points are dropped;
    ``source_index`` maps kept points back to the input positions.
    """
    weights: np.ndarray
    tol: float = 1e-12
    source_index: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        """Validate space data"""
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if weights.size == 0 or not np.all(np.isfinite(weights)):
            raise NormalizationError("Weights must be a non-empty vector of finite numbers")
        if np.any(weights < 0):
            raise NormalizationError("Weights must be nonnegative")
        total = float(weights.sum())
        if abs(total - 1.0) > self.tol:
            raise NormalizationError(f"Weights sum to {total!r}, expected 1 within {self.tol:.1e}")
        keep = np.flatnonzero(weights > 0)
        if keep.size < weights.size:
            logger.debug(f"Dropped {weights.size - keep.size} zero-weight points")
        self.weights = weights[keep]
        self.source_index = keep

    @classmethod
    def uniform(cls, size: int) -> 'DiscreteMeasureSpace':
        return cls(np.full(size, 1.0 / size))

    @property
    def size(self) -> int:
        return int(self.weights.size)

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def mask(self, points: PointSet) -> np.ndarray:
        """Boolean membership vector for a point set (indices or bool mask)"""
        points = np.asarray(points)
        if points.dtype == bool:
            if points.shape != (self.size,):
                raise DimensionMismatchError(f"Point mask has shape {points.shape}, space has {self.size} points")
            return points
        mask = np.zeros(self.size, dtype=bool)
        if points.size:
            if points.min() < 0 or points.max() >= self.size:
                raise DimensionMismatchError(f"Point indices must lie in 0..{self.size - 1}")
            mask[points.astype(np.int64)] = True
        return mask

    def measure(self, points: PointSet) -> float:
        """nu(A)"""
        return float(self.weights[self.mask(points)].sum())

    def indicator(self, points: PointSet) -> np.ndarray:
        """chi_A in the orthonormal point basis (components sqrt(nu_x) on A)"""
        return self.sqrt_weights * self.mask(points)

    def restrict(self, values: Sequence[float]) -> np.ndarray:
        """Project a vector over the original points onto the kept points"""
        values = np.asarray(values, dtype=float)
        return values[self.source_index]


@dataclass(eq=False)
class RandomVariable:
    """Real function on the points of a space"""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Random variable values must be finite")

    @classmethod
    def indicator(cls, space: DiscreteMeasureSpace, points: PointSet) -> 'RandomVariable':
        return cls(space.mask(points).astype(float))

    @classmethod
    def simple(cls, space: DiscreteMeasureSpace, partition: Sequence[PointSet],
               alphas: Sequence[float]) -> 'RandomVariable':
        """sum_i alpha_i chi_(A_i) for mutually disjoint A_i"""
        masks = _disjoint_masks(space, partition)
        if len(alphas) != len(masks):
            raise DimensionMismatchError(f"{len(alphas)} coefficients for {len(masks)} sets")
        values = np.zeros(space.size)
        for mask, alpha in zip(masks, alphas):
            values[mask] = alpha
        return cls(values)

    @property
    def positive(self) -> np.ndarray:
        """f+ = max(f, 0)"""
        return np.maximum(self.values, 0.0)

    @property
    def negative(self) -> np.ndarray:
        """f- = max(-f, 0)"""
        return np.maximum(-self.values, 0.0)

    def l2_norm(self, space: DiscreteMeasureSpace) -> float:
        _check_size(space, self)
        return float(np.sqrt(np.sum(space.weights * self.values ** 2)))

    def __mul__(self, scalar: float) -> 'RandomVariable':
        return RandomVariable(self.values * float(scalar))

    __rmul__ = __mul__

    def __add__(self, other: 'RandomVariable') -> 'RandomVariable':
        if other.values.shape != self.values.shape:
            raise DimensionMismatchError("Random variables live on different spaces")
        return RandomVariable(self.values + other.values)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(eq=False)
class QuantizedOperator:
    """f-hat in the orthonormal point basis, with its kernel"""
    matrix: np.ndarray
    kernel: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues"""
        return linalg.eigvalsh(self.matrix)

    def norm(self) -> float:
        """Operator norm"""
        values = self.eigenvalues()
        return float(np.max(np.abs(values))) if values.size else 0.0

    def __add__(self, other: 'QuantizedOperator') -> 'QuantizedOperator':
        return QuantizedOperator(self.matrix + other.matrix, self.kernel + other.kernel)

    def __sub__(self, other: 'QuantizedOperator') -> 'QuantizedOperator':
        return QuantizedOperator(self.matrix - other.matrix, self.kernel - other.kernel)

    def scaled(self, factor: float) -> 'QuantizedOperator':
        return QuantizedOperator(self.matrix * factor, self.kernel * factor)


@dataclass(eq=False)
class StateOperator:
    """Density matrix: Hermitian, positive semidefinite, unit trace"""
    matrix: np.ndarray
    tol: float = 1e-12

    def __post_init__(self):
        """Validate state data"""
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise DimensionMismatchError(f"Density matrix must be square, got {self.matrix.shape}")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > self.tol:
            raise NormalizationError("Density matrix is not Hermitian")
        trace = float(np.real(np.trace(self.matrix)))
        if abs(trace - 1.0) > self.tol:
            raise NormalizationError(f"Density matrix has trace {trace!r}")
        smallest = float(linalg.eigvalsh(self.matrix)[0])
        if smallest < -self.tol:
            raise NormalizationError(f"Density matrix has negative eigenvalue {smallest!r}")

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def pure(cls, vector: np.ndarray) -> 'StateOperator':
        """|v><v| for a unit vector v"""
        vector = np.asarray(vector, dtype=complex)
        return cls(np.outer(vector, vector.conj()))

    @classmethod
    def mixture(cls, probabilities: Sequence[float], vectors: Sequence[np.ndarray]) -> 'StateOperator':
        """sum_k p_k |v_k><v_k|"""
        size = len(vectors[0])
        matrix = np.zeros((size, size), dtype=complex)
        for p, v in zip(probabilities, vectors):
            v = np.asarray(v, dtype=complex)
            matrix += p * np.outer(v, v.conj())
        return cls(matrix)

    @classmethod
    def maximally_mixed(cls, size: int) -> 'StateOperator':
        return cls(np.eye(size, dtype=complex) / size)

    def expectation(self, operator: np.ndarray) -> float:
        """Re tr(rho X)"""
        return float(np.real(np.trace(self.matrix @ operator)))


def _check_size(space: DiscreteMeasureSpace, f: RandomVariable) -> None:
    if len(f) != space.size:
        raise DimensionMismatchError(f"Random variable has {len(f)} values, space has {space.size} points")


def _check_state(rho: StateOperator, space: DiscreteMeasureSpace) -> None:
    if rho.dimension != space.size:
        raise DimensionMismatchError(f"State has dimension {rho.dimension}, space has {space.size} points")


def _disjoint_masks(space: DiscreteMeasureSpace, sets: Sequence[PointSet]) -> List[np.ndarray]:
    masks = [space.mask(s) for s in sets]
    if masks and np.any(np.sum(masks, axis=0) > 1):
        raise DisjointnessError("Sets must be mutually disjoint")
    return masks


# Kernels and quantization

def min_kernel(values: np.ndarray) -> np.ndarray:
    """K(x, y) = min[g(x), g(y)]"""
    values = np.asarray(values, dtype=float)
    return np.minimum.outer(values, values)


def quantization_kernel(values: np.ndarray) -> np.ndarray:
    """min[f+(x), f+(y)] - min[f-(x), f-(y)]"""
    values = np.asarray(values, dtype=float)
    return min_kernel(np.maximum(values, 0.0)) - min_kernel(np.maximum(-values, 0.0))


def quantize(space: DiscreteMeasureSpace, f: RandomVariable,
             config: Optional[QProcConfig] = None) -> QuantizedOperator:
    """
    f-hat = (f+)^ - (f-)^ with entries sqrt(nu_x) sqrt(nu_y) K(x, y)

    Raises:
        BudgetExceededError: If the space is larger than the dense cap
        DimensionMismatchError: If f does not match the space
    """
    config = config or QProcConfig()
    _check_size(space, f)
    if space.size > config.dense_cap:
        raise BudgetExceededError(
            f"Quantizing on {space.size} points exceeds the dense cap {config.dense_cap}",
            m=space.size, n=0, cap=config.dense_cap,
        )
    kernel = quantization_kernel(f.values)
    s = space.sqrt_weights
    return QuantizedOperator(matrix=s[:, None] * kernel * s[None, :], kernel=kernel)


def q_integral(rho: StateOperator, space: DiscreteMeasureSpace, f: RandomVariable,
               config: Optional[QProcConfig] = None) -> float:
    """Quantum integral tr(rho f-hat)"""
    _check_state(rho, space)
    return rho.expectation(quantize(space, f, config).matrix)


def q_measure_of(rho: StateOperator, space: DiscreteMeasureSpace, points: PointSet) -> float:
    """mu_rho(A) = <rho chi_A, chi_A>"""
    _check_state(rho, space)
    chi = space.indicator(points)
    return float(np.real(np.vdot(chi, rho.matrix @ chi)))


def tail_sum_integral(rho: StateOperator, space: DiscreteMeasureSpace, f: RandomVariable) -> float:
    """
    int_0^inf mu_rho{f > s} ds - int_0^inf mu_rho{f < -s} ds as a finite sum

    On [v_(i-1), v_i) between consecutive positive levels the set {f > s}
    is {f >= v_i}, so each integral is a sum of level-set measures.
    """
    _check_size(space, f)
    _check_state(rho, space)

    def one_sided(values: np.ndarray) -> float:
        levels = np.unique(values[values > 0])
        total, previous = 0.0, 0.0
        for level in levels:
            total += (level - previous) * q_measure_of(rho, space, values >= level)
            previous = level
        return total

    return one_sided(f.values) - one_sided(-f.values)


def decoherence_operator(space: DiscreteMeasureSpace, a: PointSet, b: PointSet) -> np.ndarray:
    """D(A, B) = |chi_B><chi_A|"""
    return np.outer(space.indicator(b), space.indicator(a))


def measure_operator(space: DiscreteMeasureSpace, points: PointSet) -> np.ndarray:
    """mu-hat(A) = |chi_A><chi_A|"""
    return decoherence_operator(space, points, points)


def state_functional(rho: StateOperator, space: DiscreteMeasureSpace, a: PointSet, b: PointSet) -> complex:
    """D_rho(A, B) = tr(rho D(A, B))"""
    _check_state(rho, space)
    return complex(np.trace(rho.matrix @ decoherence_operator(space, a, b)))


# Two-valued spectra and simple-function expansions

@dataclass(eq=False)
class TwoValuedSpectrum:
    """
    Nonzero eigenpairs of (alpha chi_A + beta chi_B)^.

    ``functions`` hold g = chi_A + b chi_B (unnormalized, as functions on
    the points); ``vectors`` hold the unit eigenvectors in the orthonormal
    point basis. ``coefficients`` is None in the mixed-sign case, where the
    eigenvectors are chi_A and chi_B themselves.
    """
    eigenvalues: Tuple[float, float]
    functions: Tuple[np.ndarray, np.ndarray]
    vectors: Tuple[np.ndarray, np.ndarray]
    coefficients: Optional[Tuple[float, float]] = None


def _normalized(space: DiscreteMeasureSpace, g: np.ndarray) -> np.ndarray:
    v = space.sqrt_weights * g
    return v / np.linalg.norm(v)


def two_valued_spectrum(space: DiscreteMeasureSpace, a: PointSet, b: PointSet,
                        alpha: float, beta: float) -> TwoValuedSpectrum:
    """
    Closed-form eigenpairs of f-hat for f = alpha chi_A + beta chi_B

    For 0 < alpha < beta the eigenvalues are alpha times the roots of
    s^2 - [nu(A) + (beta/alpha) nu(B)] s + (beta/alpha - 1) nu(A) nu(B) = 0
    with g = chi_A + b chi_B, b = (s - nu(A)) / nu(B). Other same-sign
    orderings are reduced to this case by swapping the sets and negating;
    with opposite signs the eigenvalues are alpha nu(A) and beta nu(B).

    Raises:
        DisjointnessError: If A and B overlap
        PreconditionError: If nu(A) nu(B) = 0, a coefficient is 0, or alpha = beta
    """
    mask_a, mask_b = _disjoint_masks(space, [a, b])
    nu_a = float(space.weights[mask_a].sum())
    nu_b = float(space.weights[mask_b].sum())
    if nu_a == 0.0 or nu_b == 0.0:
        raise PreconditionError("Two-valued spectrum needs nu(A) nu(B) != 0")
    if alpha == 0.0 or beta == 0.0:
        raise PreconditionError("Two-valued spectrum needs nonzero coefficients")
    if alpha == beta:
        raise PreconditionError("Two-valued spectrum needs alpha != beta")

    chi_a = mask_a.astype(float)
    chi_b = mask_b.astype(float)

    if alpha * beta < 0:
        values = (alpha * nu_a, beta * nu_b)
        functions = (chi_a, chi_b)
        if values[0] < values[1]:
            values, functions = values[::-1], functions[::-1]
        return TwoValuedSpectrum(
            eigenvalues=values,
            functions=functions,
            vectors=tuple(_normalized(space, g) for g in functions),
        )

    sign = 1.0 if alpha > 0 else -1.0
    low, high = abs(alpha), abs(beta)
    chi_low, chi_high, nu_low, nu_high = chi_a, chi_b, nu_a, nu_b
    if low > high:
        low, high = high, low
        chi_low, chi_high, nu_low, nu_high = chi_b, chi_a, nu_b, nu_a

    ratio = high / low
    trace = nu_low + ratio * nu_high
    det = (ratio - 1.0) * nu_low * nu_high
    root = np.sqrt((nu_low - ratio * nu_high) ** 2 + 4.0 * nu_low * nu_high)
    roots = ((trace + root) / 2.0, det / ((trace + root) / 2.0))

    coefficients = tuple((s - nu_low) / nu_high for s in roots)
    functions = tuple(chi_low + c * chi_high for c in coefficients)
    values = tuple(sign * low * s for s in roots)
    if sign < 0:
        values, functions, coefficients = values[::-1], functions[::-1], coefficients[::-1]

    logger.debug(f"Two-valued spectrum for alpha={alpha}, beta={beta}: {values}")
    return TwoValuedSpectrum(
        eigenvalues=values,
        functions=functions,
        vectors=tuple(_normalized(space, g) for g in functions),
        coefficients=coefficients,
    )


def simple_expansion(space: DiscreteMeasureSpace, partition: Sequence[PointSet],
                     alphas: Sequence[float], config: Optional[QProcConfig] = None) -> QuantizedOperator:
    """
    f-hat for f = sum_i alpha_i chi_(A_i) assembled from two-valued pieces:
    sum over i < j of (alpha_i chi_i + alpha_j chi_j)^ - (n - 2) sum_i alpha_i chi_i^

    Raises:
        DisjointnessError: If the sets overlap
    """
    masks = _disjoint_masks(space, partition)
    if len(alphas) != len(masks):
        raise DimensionMismatchError(f"{len(alphas)} coefficients for {len(masks)} sets")
    n = len(masks)
    if n == 0:
        return quantize(space, RandomVariable(np.zeros(space.size)), config)

    singles = [quantize(space, RandomVariable(m.astype(float)), config) for m in masks]
    result = QuantizedOperator(np.zeros((space.size, space.size)), np.zeros((space.size, space.size)))
    for i in range(n):
        for j in range(i + 1, n):
            pair = RandomVariable(alphas[i] * masks[i] + alphas[j] * masks[j].astype(float))
            result = result + quantize(space, pair, config)
    for alpha, single in zip(alphas, singles):
        result = result - single.scaled((n - 2) * alpha)
    return result


def _pair_contribution(rho: StateOperator, space: DiscreteMeasureSpace, a: np.ndarray, b: np.ndarray,
                       alpha: float, beta: float) -> float:
    """tr(rho (alpha chi_A + beta chi_B)^) through eigenpairs"""
    # Degenerate pairs are multiples of a single rank-1 projection
    if not a.any() or alpha == 0.0:
        return beta * q_measure_of(rho, space, b) if b.any() else 0.0
    if not b.any() or beta == 0.0:
        return alpha * q_measure_of(rho, space, a)
    if alpha == beta:
        return alpha * q_measure_of(rho, space, a | b)
    spectrum = two_valued_spectrum(space, a, b, alpha, beta)
    return sum(lam * float(np.real(np.vdot(v, rho.matrix @ v)))
               for lam, v in zip(spectrum.eigenvalues, spectrum.vectors))


def expansion_integral(rho: StateOperator, space: DiscreteMeasureSpace, partition: Sequence[PointSet],
                       alphas: Sequence[float]) -> float:
    """
    tr(rho f-hat) for a simple f from the two-valued eigenpairs:
    sum over pairs of sum_k lambda_k <rho v_k, v_k> - (n - 2) sum_i alpha_i mu_rho(A_i)
    """
    _check_state(rho, space)
    masks = _disjoint_masks(space, partition)
    if len(alphas) != len(masks):
        raise DimensionMismatchError(f"{len(alphas)} coefficients for {len(masks)} sets")
    n = len(masks)
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            total += _pair_contribution(rho, space, masks[i], masks[j], alphas[i], alphas[j])
    total -= (n - 2) * sum(alpha * q_measure_of(rho, space, mask) for alpha, mask in zip(alphas, masks))
    return total


# Integrals against a discrete quantum process

class PathVariable:
    """
    Random variable on paths, evaluated on rank-t prefixes.

    ``evaluate(t, digits)`` returns one value per prefix row. Variables
    with a ``native_rank`` depend only on the first native_rank + 1 sites.
    """

    def __init__(self, m: int, name: str, evaluate: Callable[[int, np.ndarray], np.ndarray],
                 native_rank: Optional[int] = None):
        self.m = m
        self.name = name
        self._evaluate = evaluate
        self.native_rank = native_rank

    def evaluate(self, t: int, digits: np.ndarray) -> np.ndarray:
        if self.native_rank is not None and t < self.native_rank:
            raise PreconditionError(f"{self.name} is not determined by rank-{t} prefixes")
        return np.asarray(self._evaluate(t, digits), dtype=float)

    @classmethod
    def from_table(cls, m: int, rank: int, values: Sequence[float], name: str = "table") -> 'PathVariable':
        """Cylinder-measurable variable given by its values on Omega_rank"""
        values = np.asarray(values, dtype=float)
        if values.shape != (m ** (rank + 1),):
            raise DimensionMismatchError(f"Table needs {m ** (rank + 1)} values, got {values.size}")
        weights = m ** np.arange(rank, -1, -1, dtype=np.int64)

        def evaluate(t: int, digits: np.ndarray) -> np.ndarray:
            return values[digits[:, :rank + 1] @ weights]

        return cls(m, name, evaluate, native_rank=rank)

    def __repr__(self) -> str:
        return f"PathVariable(name={self.name!r}, m={self.m}, native_rank={self.native_rank})"


def position_variable(m: int, time: int) -> PathVariable:
    """f(g) = g_time"""
    return PathVariable(m, f"position(t={time})", lambda t, d: d[:, time], native_rank=time)


def indicator_variable(m: int, time: int, site: int) -> PathVariable:
    """f(g) = 1 when g_time = site"""
    return PathVariable(m, f"indicator(t={time}, site={site})",
                        lambda t, d: (d[:, time] == site).astype(float), native_rank=time)


def constant_variable(m: int, value: float) -> PathVariable:
    return PathVariable(m, f"constant({value})", lambda t, d: np.full(d.shape[0], float(value)), native_rank=0)


def visit_count_variable(m: int, site: int) -> PathVariable:
    """Number of visits to ``site`` up to the evaluation rank; not cylinder measurable"""
    return PathVariable(m, f"visit-count(site={site})",
                        lambda t, d: np.count_nonzero(d == site, axis=1).astype(float))


def level_set_integral(state: DecoherenceState, values: np.ndarray) -> float:
    """
    tr(rho_t f-hat) for prefix values f on a decoherence state, as the
    tail sum of q-measures of the level sets {f >= v}
    """
    def one_sided(v: np.ndarray) -> float:
        levels = np.unique(v[v > 0])
        total, previous = 0.0, 0.0
        for level in levels:
            total += (level - previous) * weighted_q_measure(state, (v >= level).astype(float))
            previous = level
        return total

    return one_sided(values) - one_sided(-values)


def quantized_expectation(state: DecoherenceState, values: np.ndarray, config: Optional[QProcConfig] = None) -> float:
    """
    tr(D_t K) with K the min-kernel of the prefix values, evaluated blockwise
    over final sites. Independent of the level-set route; small ranks only.
    """
    config = config or QProcConfig()
    values = np.asarray(values, dtype=float)
    if values.shape != state.amplitudes.shape:
        raise DimensionMismatchError(f"Values have shape {values.shape}, state stores {state.amplitudes.shape}")
    if values.size > config.dense_cap:
        raise BudgetExceededError(
            f"Kernel over {values.size} paths exceeds the dense cap {config.dense_cap}",
            m=state.m, n=state.rank, cap=config.dense_cap,
        )
    total = 0.0
    for site in range(state.m):
        block = state.final_sites == site
        amps = state.amplitudes[block]
        kernel = quantization_kernel(values[block])
        total += float(np.real(np.vdot(amps, kernel @ amps)))
    return total


def process_integral(process: QProcess, f: PathVariable, t_max: Optional[int] = None,
                     window: Optional[int] = None, tol: Optional[float] = None) -> SuitabilityReport:
    """
    Windowed limit of tr(rho_t f-hat) over ranks t >= the variable's native rank

    Returns:
        SuitabilityReport over the evaluated ranks; ``limit`` is the integral
        when the verdict is suitable
    """
    if f.m != process.m:
        raise DimensionMismatchError(f"Variable {f.name} has m={f.m}, process has m={process.m}")

    def evaluate(t: int) -> float:
        return level_set_integral(process.state(t), f.evaluate(t, process.digits(t)))

    return process.sweep(f.name, evaluate, start=f.native_rank or 0, t_max=t_max, window=window, tol=tol)
