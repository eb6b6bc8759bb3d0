"""Classical erasure-code building blocks.

Two constructions live here, both described by coefficient rows over
the message symbols so that the same audit and the same striping
machinery apply to each:

* ``make_cauchy_mds`` builds a systematic scalar MDS code (one symbol
  per node) from a Cauchy block, for any n and k the field can hold.

* The 4-node, 2-fault array code over GF(2): each node keeps two
  binary blocks, and a single lost node is rebuilt from three block
  reads instead of the four a plain decode would need.  Its layout and
  per-failure repair plans are frozen constants; the tests re-derive
  them from first principles.

``audit_mds`` is the shared judge: a placement of coefficient rows on
nodes has the any-k property iff every k-subset of nodes exposes rows
of full message rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .errors import (
    CodingError,
    FieldTooSmallError,
    InvalidRepairError,
    UnsupportedCodeError,
)
from .ffmatrix import FieldMatrix, rows_rank
from .galois import GF
from .trace import RepairTrace

__all__ = [
    "FAMILIES",
    "CodeSpec",
    "NodeShare",
    "make_cauchy_mds",
    "AuditResult",
    "audit_mds",
    "EVENODD_N",
    "EVENODD_K",
    "EVENODD_ROWS",
    "RepairPlan",
    "evenodd_repair_plan",
    "evenodd42_encode",
    "evenodd42_repair",
    "evenodd42_decode",
    "xor_bytes",
]

FAMILIES = (
    "cauchy-mds",
    "evenodd42",
    "exact-mbr",
    "exact-msr",
    "hybrid",
    "rlnc-functional",
)


@dataclass(frozen=True)
class CodeSpec:
    """The deployed-instance tuple: geometry, bandwidth, field, family."""

    n: int
    k: int
    d: int
    alpha: int
    beta: int
    field: GF
    family: str

    def __post_init__(self):
        if not self.k < self.n:
            raise CodingError(f"need k < n, got n={self.n} k={self.k}")
        if not self.k <= self.d <= self.n - 1:
            raise CodingError(
                f"need k <= d <= n-1, got k={self.k} d={self.d}"
            )
        if self.alpha < 1 or self.beta < 1:
            raise CodingError("alpha and beta must be at least 1")
        if self.family not in FAMILIES:
            raise UnsupportedCodeError(f"unknown family {self.family!r}")

    @property
    def gamma(self) -> int:
        return self.d * self.beta


@dataclass(frozen=True)
class NodeShare:
    """What one node holds: its blocks, stamped with a repair epoch."""

    node_id: int
    blocks: tuple
    generation: int = 0


def make_cauchy_mds(n: int, k: int, field: GF) -> FieldMatrix:
    """Systematic MDS generator, one coefficient row per node.

    Rows 0..k-1 are the identity (data nodes); the remaining rows are
    a Cauchy block, so every k-subset of rows is invertible.
    """
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n} k={k}")
    if field.q < n + k:
        raise FieldTooSmallError(
            f"need field size >= {n + k} for a {n}-node Cauchy layout, "
            f"have {field.q}"
        )
    rows = [[1 if c == r else 0 for c in range(k)] for r in range(k)]
    for r in range(n - k):
        # x-coordinates k..n-1 and y-coordinates 0..k-1 never collide,
        # so every denominator x + y is invertible.
        rows.append([field.inv(field.add(k + r, c)) for c in range(k)])
    return FieldMatrix(field, rows)


@dataclass(frozen=True)
class AuditResult:
    ok: bool
    failing: Optional[tuple[int, ...]] = None

    def __bool__(self) -> bool:
        return self.ok


def audit_mds(
    node_rows: Sequence[Sequence[Sequence[int]]],
    k: int,
    symbol_count: int,
    field: GF,
) -> AuditResult:
    """Check the any-k-of-n recovery property of a row placement.

    ``node_rows[i]`` is the list of coefficient rows stored by node i,
    each of length ``symbol_count``.  Returns the first k-subset whose
    stacked rows fall short of full rank, if any.
    """
    n = len(node_rows)
    for subset in combinations(range(n), k):
        stacked = [row for i in subset for row in node_rows[i]]
        if rows_rank(field, stacked) != symbol_count:
            return AuditResult(False, subset)
    return AuditResult(True)


# The array code: 4 nodes, any 2 recover, over GF(2).  Message blocks
# are ordered (A1, A2, B1, B2); node i stores the two combinations
# given by EVENODD_ROWS[i].
EVENODD_N = 4
EVENODD_K = 2
EVENODD_ROWS: tuple[tuple[tuple[int, ...], ...], ...] = (
    ((1, 0, 0, 0), (0, 1, 0, 0)),
    ((0, 0, 1, 0), (0, 0, 0, 1)),
    ((1, 0, 1, 0), (0, 1, 0, 1)),
    ((0, 1, 1, 0), (1, 1, 0, 1)),
)


@dataclass(frozen=True)
class RepairPlan:
    """A fixed one-failure repair recipe.

    ``downloads`` lists (survivor, weights): the survivor combines its
    stored blocks with the weights and ships one block.  ``rebuild``
    gives the lost node's blocks as combinations of the downloads, in
    storage order.
    """

    failed: int
    downloads: tuple[tuple[int, tuple[int, ...]], ...]
    rebuild: tuple[tuple[int, ...], ...]

    @property
    def symbols_moved(self) -> int:
        return len(self.downloads)


_EVENODD_PLANS: dict[int, RepairPlan] = {
    0: RepairPlan(
        0,
        ((1, (0, 1)), (2, (0, 1)), (3, (0, 1))),
        ((0, 1, 1), (1, 1, 0)),
    ),
    1: RepairPlan(
        1,
        ((0, (1, 0)), (2, (1, 0)), (3, (1, 1))),
        ((1, 1, 0), (0, 1, 1)),
    ),
    2: RepairPlan(
        2,
        ((0, (1, 0)), (1, (1, 0)), (3, (0, 1))),
        ((1, 1, 0), (1, 0, 1)),
    ),
    3: RepairPlan(
        3,
        ((0, (1, 0)), (1, (1, 1)), (2, (0, 1))),
        ((0, 1, 1), (1, 0, 1)),
    ),
}


def evenodd_repair_plan(failed: int) -> RepairPlan:
    """Three-block repair recipe for one lost node of the array code."""
    if failed not in _EVENODD_PLANS:
        raise InvalidRepairError(f"no such node: {failed}")
    return _EVENODD_PLANS[failed]


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("blocks must have equal length")
    return bytes(x ^ y for x, y in zip(a, b))


def _combine_blocks(weights: Sequence[int], blocks: Sequence[bytes]) -> bytes:
    """GF(2) combination of equal-length byte blocks."""
    acc = bytes(len(blocks[0]))
    for w, blk in zip(weights, blocks):
        if w:
            acc = xor_bytes(acc, blk)
    return acc


def evenodd42_encode(blocks: Sequence[bytes]) -> list[NodeShare]:
    """Spread four equal-length data blocks over the four array nodes."""
    if len(blocks) != 4:
        raise ValueError("expected 4 data blocks")
    if len({len(b) for b in blocks}) != 1:
        raise ValueError("blocks must have equal length")
    return [
        NodeShare(i, tuple(_combine_blocks(row, blocks) for row in rows))
        for i, rows in enumerate(EVENODD_ROWS)
    ]


def evenodd42_repair(
    failed: int, survivors: Sequence[NodeShare]
) -> tuple[NodeShare, RepairTrace]:
    """Rebuild one lost array-code share from three one-block downloads."""
    plan = evenodd_repair_plan(failed)
    by_id = {s.node_id: s for s in survivors}
    downloads = []
    for node, weights in plan.downloads:
        if node not in by_id:
            raise InvalidRepairError(f"survivor {node} not supplied")
        downloads.append(_combine_blocks(weights, by_id[node].blocks))
    rebuilt = tuple(_combine_blocks(row, downloads) for row in plan.rebuild)
    helpers = tuple(node for node, _ in plan.downloads)
    trace = RepairTrace(
        epoch=0,
        failed=failed,
        helpers=helpers,
        per_helper=tuple(1 for _ in helpers),
        total_symbols=len(downloads),
        audit_ok=True,
        family="evenodd42",
    )
    return NodeShare(failed, rebuilt), trace


def evenodd42_decode(shares: Sequence[NodeShare]) -> list[bytes]:
    """Recover the four data blocks from any two array-code shares."""
    if len({s.node_id for s in shares}) != 2:
        raise ValueError("need exactly 2 distinct shares")
    f2 = GF(1)
    rows = []
    blocks = []
    for s in shares:
        for row, blk in zip(EVENODD_ROWS[s.node_id], s.blocks):
            rows.append(list(row))
            blocks.append(blk)
    inverse = FieldMatrix(f2, rows).invert()
    return [_combine_blocks(inv_row, blocks) for inv_row in inverse.rows]
