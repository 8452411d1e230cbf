"""Exception hierarchy shared by all hyperlat modules."""


class HyperlatError(Exception):
    """Base class for all package-specific errors."""


class NumericError(HyperlatError):
    """A numerical procedure failed (factorization, quadrature, truncation)."""


class NegativeEigenvalueError(NumericError):
    """Circulant embedding produced an eigenvalue below -tol (invalid embedding)."""


class FactorizationFailure(NumericError):
    """Dense covariance matrix is not numerically PSD even after jitter."""


class TruncationTooLarge(NumericError):
    """Lattice-sum truncation would exceed the configured term cap."""


class QuadratureFailure(NumericError):
    """Adaptive quadrature or series acceleration did not converge."""


class UsageError(HyperlatError):
    """Invalid parameters or inputs (domain errors, grid contracts, windows)."""


class WindowTooSmall(UsageError):
    """Observation window violates the boundary policy for the requested statistic."""


class DegenerateEnsemble(UsageError):
    """Fewer than two realizations: sample variance undefined."""


class InsufficientData(UsageError):
    """Not enough points for the requested fit."""


class NonpositiveVariance(UsageError):
    """Log-log regression requires strictly positive variances."""


class GridMismatch(UsageError):
    """Requested frequency is not on the dual grid of the observation window."""
