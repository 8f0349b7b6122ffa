"""
Custom exceptions for qproc
"""


class QProcError(Exception):
    """Base exception for qproc errors"""
    pass


class ConfigurationError(QProcError):
    """Experiment or library configuration is invalid"""
    pass


class BudgetExceededError(QProcError):
    """Path enumeration or dense materialization would exceed its cap"""

    def __init__(self, message: str, m: int, n: int, cap: int):
        self.m = m
        self.n = n
        self.cap = cap
        super().__init__(message)


class UnitarityError(QProcError):
    """A matrix tagged unitary failed the unitarity check"""

    def __init__(self, message: str, deviation: float):
        self.deviation = deviation
        super().__init__(message)


class NormalizationError(QProcError):
    """A state vector or weight vector is not normalized"""
    pass


class PropagatorError(QProcError):
    """Propagator requested for r > s or beyond the available steps"""
    pass


class RankMismatchError(QProcError):
    """Event rank does not match the decoherence state rank"""
    pass


class DisjointnessError(QProcError):
    """Sets required to be mutually disjoint overlap"""
    pass


class DimensionMismatchError(QProcError):
    """State, space and random variable dimensions disagree"""
    pass


class PreconditionError(QProcError):
    """An operation precondition is violated"""
    pass


class NonConvergenceError(QProcError):
    """A suitability sweep did not converge where convergence was required"""

    def __init__(self, message: str, verdict: str):
        self.verdict = verdict
        super().__init__(message)
