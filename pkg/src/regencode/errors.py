"""Exception types shared across the package."""


class CodingError(Exception):
    """Base class for all errors raised by this package."""


class FieldMismatchError(CodingError):
    """Two values from different field specs were combined."""


class FieldTooSmallError(CodingError):
    """The chosen field has too few elements for the construction."""


class SingularMatrixError(CodingError):
    """Inversion was asked of a matrix with deficient rank."""


class NoSolutionError(CodingError):
    """A linear system is inconsistent."""


class InfeasibleBandwidthError(CodingError):
    """Repair bandwidth below the minimum the cut-set bound allows."""


class InvalidHistoryError(CodingError):
    """A failure history references dead nodes or has bad helper sets."""


class InvalidRepairError(CodingError):
    """A repair request that the code family cannot serve."""


class ConstructionFailure(CodingError):
    """Randomized code search exhausted its attempt budget."""


class RepairSearchFailure(CodingError):
    """Randomized repair search exhausted its attempt budget."""


class ShareFormatError(CodingError):
    """A share file is truncated, corrupt, or not ours."""


class UnsupportedCodeError(CodingError):
    """The (family, n, k, d, field) combination is not supported."""
