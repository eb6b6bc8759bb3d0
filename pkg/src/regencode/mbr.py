"""Exact repair at the minimum-bandwidth corner, d = n-1.

The construction assigns one coded symbol to every unordered pair of
nodes; each node stores the symbols of the pairs it belongs to, so
alpha = n-1.  When a node fails, each survivor ships its stored copy
of the one symbol it shares with the failed node.  The newcomer
stores the d received symbols as-is: repair is pure transfer, no
arithmetic, and the bytes moved equal the bytes stored, which is the
defining property of this corner of the tradeoff.

The pair symbols are a precoding of the actual file.  Any k nodes
touch exactly M = k*(n-1) - k*(k-1)/2 distinct pairs, so the precode
must make every such exposed set independent; an MDS precode over the
pair symbols does.  With one redundant pair symbol a single parity
row suffices (works even over GF(2)); with none, the identity; in
general a Cauchy block, which needs a field of at least N = n(n-1)/2
elements.
"""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

from .errors import FieldTooSmallError, InvalidRepairError, UnsupportedCodeError
from .ffmatrix import FieldMatrix, FieldVector
from .galois import GF
from .mdscore import CodeSpec, NodeShare, RepairPlan
from .trace import RepairTrace

__all__ = [
    "MbrLayout",
    "mbr_construct",
    "mbr_encode",
    "mbr_repair",
    "mbr_decode",
]


class MbrLayout:
    """Pairwise-storage regenerating code (d = n-1 only)."""

    family = "exact-mbr"

    def __init__(self, n: int, k: int, field: GF):
        if not 0 < k < n:
            raise UnsupportedCodeError(f"need 0 < k < n, got n={n} k={k}")
        if n < 3:
            raise UnsupportedCodeError("need at least 3 nodes")
        self.n = n
        self.k = k
        self.d = n - 1
        self.alpha = n - 1
        self.beta = 1
        self.field = field
        self.pair_count = n * (n - 1) // 2
        self.message_symbols = k * self.d - k * (k - 1) // 2
        redundant = self.pair_count - self.message_symbols
        if redundant >= 2 and field.q < self.pair_count:
            raise FieldTooSmallError(
                f"precode needs a field of at least {self.pair_count} "
                f"elements, have {field.q}"
            )

    @property
    def spec(self) -> CodeSpec:
        return CodeSpec(
            self.n, self.k, self.d, self.alpha, self.beta,
            self.field, self.family,
        )

    def pair_index(self, i: int, j: int) -> int:
        """Position of the unordered pair {i, j} in lexicographic order."""
        if i == j or not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError(f"not a node pair: ({i}, {j})")
        if i > j:
            i, j = j, i
        return i * self.n - i * (i + 1) // 2 + (j - i - 1)

    def node_pairs(self, node: int) -> tuple[tuple[int, int], ...]:
        """(pair index, other endpoint) for a node's blocks, in order."""
        return tuple(
            (self.pair_index(node, other), other)
            for other in range(self.n)
            if other != node
        )

    @cached_property
    def precode(self) -> FieldMatrix:
        """N x M matrix mapping file symbols to pair symbols."""
        big_n, m = self.pair_count, self.message_symbols
        rows = [[1 if c == r else 0 for c in range(m)] for r in range(m)]
        redundant = big_n - m
        if redundant == 1:
            rows.append([1] * m)
        elif redundant >= 2:
            # Cauchy rows: x-coordinates m..N-1, y-coordinates 0..m-1.
            f = self.field
            for r in range(redundant):
                rows.append([f.inv(f.add(m + r, c)) for c in range(m)])
        return FieldMatrix(self.field, rows)

    def node_rows(self, node: int) -> tuple[tuple[int, ...], ...]:
        """Coefficient rows (over the file symbols) a node stores."""
        pre = self.precode
        return tuple(tuple(pre.rows[p]) for p, _ in self.node_pairs(node))

    def all_node_rows(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        return tuple(self.node_rows(i) for i in range(self.n))

    def encode(self, data: list[int]) -> list[list[int]]:
        """Per-node stored symbols for one stripe of M file symbols."""
        if len(data) != self.message_symbols:
            raise ValueError(
                f"expected {self.message_symbols} symbols, got {len(data)}"
            )
        coded = self.precode.matvec(FieldVector(self.field, data))
        return [
            [coded[p] for p, _ in self.node_pairs(node)]
            for node in range(self.n)
        ]

    def repair_plan(self, failed: int) -> RepairPlan:
        """Every survivor ships its copy of the shared pair symbol."""
        if not 0 <= failed < self.n:
            raise InvalidRepairError(f"no such node: {failed}")
        downloads = []
        for survivor in range(self.n):
            if survivor == failed:
                continue
            # The survivor's block whose pair touches the failed node.
            pos = next(
                idx for idx, (_, other) in enumerate(self.node_pairs(survivor))
                if other == failed
            )
            weights = tuple(
                1 if t == pos else 0 for t in range(self.alpha)
            )
            downloads.append((survivor, weights))
        ident = tuple(
            tuple(1 if c == r else 0 for c in range(self.d))
            for r in range(self.d)
        )
        return RepairPlan(failed, tuple(downloads), ident)

    def exposed_pairs(self, subset) -> tuple[int, ...]:
        """Distinct pair indices a node subset stores, ascending."""
        seen = set()
        for node in subset:
            for p, _ in self.node_pairs(node):
                seen.add(p)
        return tuple(sorted(seen))

    def decode(self, subset, symbols_by_node) -> list[int]:
        """Recover the stripe from any k nodes' stored symbols.

        ``symbols_by_node[i]`` holds the symbols of ``subset[i]`` in
        storage order.  Duplicate pair symbols (both endpoints inside
        the subset) are collapsed before the solve.
        """
        subset = tuple(subset)
        if len(set(subset)) != self.k:
            raise ValueError(f"need exactly {self.k} distinct nodes")
        by_pair: dict[int, int] = {}
        for node, syms in zip(subset, symbols_by_node):
            for (p, _), s in zip(self.node_pairs(node), syms):
                if p in by_pair and by_pair[p] != s:
                    raise ValueError(f"conflicting copies of pair symbol {p}")
                by_pair[p] = s
        pairs = sorted(by_pair)
        if len(pairs) != self.message_symbols:
            raise ValueError("subset does not expose a full symbol set")
        mat = FieldMatrix(
            self.field, [list(self.precode.rows[p]) for p in pairs]
        )
        return list(mat.solve([by_pair[p] for p in pairs]))


def mbr_construct(n: int, k: int, field: GF) -> MbrLayout:
    """Build and sanity-check a pairwise layout for these parameters."""
    return MbrLayout(n, k, field)


def mbr_encode(layout: MbrLayout, data: Sequence[int]) -> list[NodeShare]:
    """One stripe of M symbols spread over the n nodes."""
    stored = layout.encode(list(data))
    return [NodeShare(i, tuple(s)) for i, s in enumerate(stored)]


def mbr_repair(
    layout: MbrLayout,
    failed: int,
    survivors: Sequence[NodeShare],
    epoch: int = 0,
) -> tuple[NodeShare, RepairTrace]:
    """Rebuild a node by pure transfer of its shared pair symbols.

    Each survivor ships exactly the one symbol it shares with the
    failed node; the newcomer stores the d downloads verbatim.
    """
    plan = layout.repair_plan(failed)
    by_id = {s.node_id: s for s in survivors}
    downloads = []
    for node, weights in plan.downloads:
        if node not in by_id:
            raise InvalidRepairError(f"survivor {node} not supplied")
        pos = weights.index(1)
        downloads.append(by_id[node].blocks[pos])
    # rebuild rows are the identity: stored order equals download order
    rebuilt = tuple(downloads)
    helpers = tuple(node for node, _ in plan.downloads)
    trace = RepairTrace(
        epoch=epoch,
        failed=failed,
        helpers=helpers,
        per_helper=tuple(1 for _ in helpers),
        total_symbols=len(downloads),
        audit_ok=True,
        family=layout.family,
    )
    return NodeShare(failed, rebuilt, generation=epoch), trace


def mbr_decode(layout: MbrLayout, shares: Sequence[NodeShare]) -> list[int]:
    """Recover the stripe from any k nodes' shares."""
    subset = [s.node_id for s in shares]
    return layout.decode(subset, [list(s.blocks) for s in shares])
