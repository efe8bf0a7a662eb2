"""Exception types shared across the package."""


class LinflowError(Exception):
    """Base class for all package-specific errors."""


class SingularMatrixError(LinflowError):
    """A linear solve hit a pivot too small to trust."""


class NotSymmetricError(LinflowError):
    """An eigendecomposition was requested for a non-symmetric matrix."""


class RankDeficientError(LinflowError):
    """Least squares requires full column rank."""


class ZeroRowError(LinflowError):
    """A coefficient row has numerically zero norm."""


class InconsistentPatchError(LinflowError):
    """A node's own equations contradict each other: its set is empty."""


class EmptyIntersectionError(LinflowError):
    """The joint solution set is empty (inconsistent system)."""


class NotStronglyConnectedError(LinflowError):
    """The operation requires a strongly connected digraph."""


class NotPositiveDefiniteError(LinflowError):
    """The quadratic-form matrix is not positive definite."""


class DimensionMismatchError(LinflowError):
    """Inputs disagree on node count or state dimension."""


class TimeZeroDecayError(LinflowError):
    """The 1/t-weighted flow is undefined at t <= 0."""


class NonFiniteStateError(LinflowError):
    """The simulated state left the finite range (divergence guard)."""


class PreconditionError(LinflowError):
    """A documented hypothesis of an analysis routine does not hold."""


class ConfigError(LinflowError):
    """An experiment configuration failed validation."""
