"""Exception types shared across the package.

Plain ``ValueError`` is used for argument validation (wrong shapes, empty
pools, negative degrees); the classes below mark failures of the numerical
machinery itself.
"""


class SegpcError(Exception):
    """Base class for package-specific errors."""


class RankDeficientError(SegpcError):
    """A measurement or regression matrix is numerically rank deficient."""

    def __init__(self, message, cond_number=None):
        super().__init__(message)
        self.cond_number = cond_number


class InsufficientSamplesError(SegpcError):
    """Fewer equations than unknown spectral coefficients."""


class UnsupportedModelError(SegpcError):
    """The requested operation needs a capability the model does not have."""


class SolverDivergenceError(SegpcError):
    """A nonlinear solve failed to reach the residual tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class AdjointSolveError(SegpcError):
    """The linear adjoint system could not be solved."""
