"""Erasure coding toolkit for distributed storage repair.

Provides binary extension field arithmetic, exact linear algebra over
those fields, classic MDS and Evenodd array codes, the storage versus
repair-bandwidth tradeoff curve, an information flow graph feasibility
checker, and several repair-efficient code families (random linear
network coding, repair-by-transfer, interference-aligned systematic
codes, and hybrid exact-systematic repair) together with a file-level
CLI and simulator.
"""

__version__ = "0.1.0"

from .errors import (
    CodingError,
    ConstructionFailure,
    FieldMismatchError,
    FieldTooSmallError,
    InfeasibleBandwidthError,
    InvalidHistoryError,
    InvalidRepairError,
    NoSolutionError,
    RepairSearchFailure,
    ShareFormatError,
    SingularMatrixError,
    UnsupportedCodeError,
)
from .galois import GF, FieldElement

__all__ = [
    "GF",
    "FieldElement",
    "CodingError",
    "ConstructionFailure",
    "FieldMismatchError",
    "FieldTooSmallError",
    "InfeasibleBandwidthError",
    "InvalidHistoryError",
    "InvalidRepairError",
    "NoSolutionError",
    "RepairSearchFailure",
    "ShareFormatError",
    "SingularMatrixError",
    "UnsupportedCodeError",
]
