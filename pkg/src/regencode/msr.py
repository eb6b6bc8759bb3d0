"""Exact repair at the minimum-storage corner, rate one half.

Parameters are n = 2k nodes, any-k decode, and repairs that contact
all d = 2k-1 survivors for one symbol each.  The file is k blocks of
k symbols; k systematic nodes store the blocks verbatim and k parity
nodes store mixtures

    parity i   =   sum_j  transpose(E[j][i]) w_j,
    E[j][i]    =   u_i v_j^T  +  c[j][i] I.

Each mixing matrix is a rank-one director plus a scaled identity.
During a repair every survivor ships its stored vector dotted with
one common projection p.  The rank-one parts all collapse onto the
single direction u_i, and choosing p orthogonal to the other blocks'
v-vectors makes the remaining interference from each unwanted block a
single scalar.  That leaves 2k-1 unknowns against 2k-1 received
symbols: a square solve rebuilds the lost node exactly.

The scalars are not free: c[j][i] = coupling * (v_j . u_i) for one
field constant ``coupling`` outside {0, 1}.  That choice makes the
inverse of the whole mixing map have the same rank-one-plus-identity
shape with dual directors, so parity nodes are repaired by the mirror
of the systematic procedure.  Closed forms for the duals are below;
the tests check them against a brute-force block inverse.

``msr_construct`` searches director candidates (a couple of pinned
instances, then scaled power columns, then random draws) and accepts
only candidates that pass the full verification predicate: every
k-subset decodes and all 2k single-node repairs reproduce the lost
share on sample data.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

from .errors import (
    ConstructionFailure,
    FieldTooSmallError,
    InvalidRepairError,
    SingularMatrixError,
    UnsupportedCodeError,
)
from .ffmatrix import FieldMatrix, rows_rank
from .galois import GF
from .mdscore import CodeSpec, NodeShare, RepairPlan
from .trace import RepairTrace

__all__ = [
    "MsrCode",
    "msr_construct",
    "msr_encode",
    "msr_repair_systematic",
    "msr_repair_parity",
    "msr_repair",
    "msr_decode",
]


def _dot(field: GF, a, b) -> int:
    acc = 0
    for x, y in zip(a, b):
        acc = field.add(acc, field.mul(x, y))
    return acc


@dataclass(frozen=True)
class MsrCode:
    """One verified instance: directors, coupling constant, field."""

    k: int
    field: GF
    left_dirs: tuple[tuple[int, ...], ...]
    right_dirs: tuple[tuple[int, ...], ...]
    coupling: int

    family = "exact-msr"

    @property
    def n(self) -> int:
        return 2 * self.k

    @property
    def d(self) -> int:
        return 2 * self.k - 1

    @property
    def alpha(self) -> int:
        return self.k

    @property
    def beta(self) -> int:
        return 1

    @property
    def message_symbols(self) -> int:
        return self.k * self.k

    @property
    def spec(self) -> CodeSpec:
        return CodeSpec(
            self.n, self.k, self.d, self.alpha, self.beta,
            self.field, self.family,
        )

    @cached_property
    def diag_coeffs(self) -> tuple[tuple[int, ...], ...]:
        """c[j][i] = coupling * (v_j . u_i); must be zero-free."""
        f = self.field
        return tuple(
            tuple(
                f.mul(self.coupling, _dot(f, v, u)) for u in self.left_dirs
            )
            for v in self.right_dirs
        )

    def mix_block(self, j: int, i: int) -> list[list[int]]:
        """E[j][i], the k x k block mixing data block j into parity i."""
        f = self.field
        u, v = self.left_dirs[i], self.right_dirs[j]
        c = self.diag_coeffs[j][i]
        return [
            [
                f.add(f.mul(u[s], v[t]), c if s == t else 0)
                for t in range(self.k)
            ]
            for s in range(self.k)
        ]

    @cached_property
    def _dual(self):
        """Directors of the inverse mixing map, by the closed forms."""
        f, k = self.field, self.k
        kap = self.coupling
        kinv = f.inv(kap)
        vcols = FieldMatrix(
            f, [[self.right_dirs[j][s] for j in range(k)] for s in range(k)]
        )
        ucols = FieldMatrix(
            f, [[self.left_dirs[i][s] for i in range(k)] for s in range(k)]
        )
        vinv = vcols.invert()
        uinv = ucols.invert()
        su = kinv
        sv = f.inv(f.add(kap, kinv))
        dual_left = tuple(
            tuple(f.mul(su, x) for x in vinv.rows[j]) for j in range(k)
        )
        dual_right = tuple(
            tuple(f.mul(sv, x) for x in uinv.rows[i]) for i in range(k)
        )
        dual_diag = tuple(
            tuple(f.mul(kap, _dot(f, dual_right[i], dual_left[j]))
                  for j in range(k))
            for i in range(k)
        )
        return dual_left, dual_right, dual_diag

    @property
    def dual_left_dirs(self):
        return self._dual[0]

    @property
    def dual_right_dirs(self):
        return self._dual[1]

    @property
    def dual_diag_coeffs(self):
        return self._dual[2]

    def node_rows(self, node: int) -> tuple[tuple[int, ...], ...]:
        """Coefficient rows over the k*k file symbols for one node."""
        k, m = self.k, self.message_symbols
        if not 0 <= node < self.n:
            raise ValueError(f"no such node: {node}")
        if node < k:
            return tuple(
                tuple(1 if c == node * k + t else 0 for c in range(m))
                for t in range(k)
            )
        i = node - k
        blocks = [self.mix_block(j, i) for j in range(k)]
        rows = []
        for t in range(k):
            row = [0] * m
            for j in range(k):
                for s in range(k):
                    row[j * k + s] = blocks[j][s][t]
            rows.append(tuple(row))
        return tuple(rows)

    def all_node_rows(self):
        return tuple(self.node_rows(v) for v in range(self.n))

    def encode(self, data: list[int]) -> list[list[int]]:
        if len(data) != self.message_symbols:
            raise ValueError(
                f"expected {self.message_symbols} symbols, got {len(data)}"
            )
        f = self.field
        return [
            [_dot(f, row, data) for row in self.node_rows(v)]
            for v in range(self.n)
        ]

    def _null_direction(self, rows) -> tuple[int, ...]:
        basis = FieldMatrix(self.field, [list(r) for r in rows]).null_space()
        if len(basis) != 1:
            raise SingularMatrixError("directors are degenerate")
        return tuple(basis[0])

    def systematic_projection(self, j: int) -> tuple[int, ...]:
        """Common download direction for repairing systematic node j."""
        return self._null_direction(
            [self.right_dirs[x] for x in range(self.k) if x != j]
        )

    def parity_projection(self, i: int) -> tuple[int, ...]:
        """Download direction for parity repairs, from the dual code."""
        dual_right = self.dual_right_dirs
        return self._null_direction(
            [dual_right[x] for x in range(self.k) if x != i]
        )

    def repair_plan(self, failed: int) -> RepairPlan:
        """Single-symbol downloads from all survivors, then one solve.

        Equations are ordered by survivor id; unknowns are the lost
        node's k symbols followed by the interference scalars of the
        other blocks, ascending.  The rebuild rows are the top k rows
        of the system inverse.
        """
        f, k = self.field, self.k
        if not 0 <= failed < self.n:
            raise InvalidRepairError(f"no such node: {failed}")
        survivors = [x for x in range(self.n) if x != failed]
        if failed < k:
            p = self.systematic_projection(failed)
            others = [j for j in range(k) if j != failed]
            vp = _dot(f, self.right_dirs[failed], p)
            rows = []
            for s in survivors:
                row = [0] * (2 * k - 1)
                if s < k:
                    row[k + others.index(s)] = 1
                else:
                    i = s - k
                    u = self.left_dirs[i]
                    c_star = self.diag_coeffs[failed][i]
                    for t in range(k):
                        row[t] = f.add(f.mul(vp, u[t]), f.mul(c_star, p[t]))
                    for pos, j in enumerate(others):
                        row[k + pos] = self.diag_coeffs[j][i]
                rows.append(row)
        else:
            i_star = failed - k
            p = self.parity_projection(i_star)
            dual_left, dual_right, dual_diag = self._dual
            others = [i for i in range(k) if i != i_star]
            vp = _dot(f, dual_right[i_star], p)
            rows = []
            for s in survivors:
                row = [0] * (2 * k - 1)
                if s < k:
                    u = dual_left[s]
                    c_star = dual_diag[i_star][s]
                    for t in range(k):
                        row[t] = f.add(f.mul(vp, u[t]), f.mul(c_star, p[t]))
                    for pos, i in enumerate(others):
                        row[k + pos] = dual_diag[i][s]
                else:
                    row[k + others.index(s - k)] = 1
                rows.append(row)
        system = FieldMatrix(f, rows)
        inverse = system.invert()
        rebuild = tuple(tuple(inverse.rows[t]) for t in range(k))
        downloads = tuple((s, tuple(p)) for s in survivors)
        return RepairPlan(failed, downloads, rebuild)

    def decode(self, subset, symbols_by_node) -> list[int]:
        """Recover all k*k file symbols from any k nodes' shares."""
        subset = tuple(subset)
        if len(set(subset)) != self.k:
            raise ValueError(f"need exactly {self.k} distinct nodes")
        rows: list[list[int]] = []
        rhs: list[int] = []
        for node, syms in zip(subset, symbols_by_node):
            for row, s in zip(self.node_rows(node), syms):
                rows.append(list(row))
                rhs.append(s)
        return list(FieldMatrix(self.field, rows).solve(rhs))

    def verify(self, sample_seed: int = 0) -> bool:
        """Full acceptance predicate for one candidate instance."""
        f, k = self.field, self.k
        if self.coupling in (0, 1):
            return False
        if any(c == 0 for row in self.diag_coeffs for c in row):
            return False
        node_rows = self.all_node_rows()
        for subset in combinations(range(self.n), k):
            stacked = [row for v in subset for row in node_rows[v]]
            if rows_rank(f, stacked) != self.message_symbols:
                return False
        rng = random.Random(f"msr-verify:{sample_seed}")
        data = [rng.randrange(f.q) for _ in range(self.message_symbols)]
        shares = self.encode(data)
        try:
            for failed in range(self.n):
                plan = self.repair_plan(failed)
                got = [
                    _dot(f, plan.rebuild[t],
                         [_dot(f, w, shares[s]) for s, w in plan.downloads])
                    for t in range(k)
                ]
                if got != shares[failed]:
                    return False
        except SingularMatrixError:
            return False
        return True


def msr_encode(code: MsrCode, data) -> list[NodeShare]:
    """Spread one stripe over the 2k nodes.

    ``data`` is either k information vectors of length k or the flat
    k*k symbol list; systematic shares equal the raw vectors.
    """
    flat = list(data)
    if flat and isinstance(flat[0], (list, tuple)):
        flat = [s for vec in flat for s in vec]
    stored = code.encode(flat)
    return [NodeShare(v, tuple(s)) for v, s in enumerate(stored)]


def _apply_plan(
    code: MsrCode,
    plan: RepairPlan,
    survivors,
    epoch: int,
) -> tuple[NodeShare, RepairTrace]:
    f = code.field
    by_id = {s.node_id: s for s in survivors}
    downloads = []
    for node, weights in plan.downloads:
        if node not in by_id:
            raise InvalidRepairError(f"survivor {node} not supplied")
        downloads.append(_dot(f, weights, by_id[node].blocks))
    rebuilt = tuple(_dot(f, row, downloads) for row in plan.rebuild)
    helpers = tuple(node for node, _ in plan.downloads)
    trace = RepairTrace(
        epoch=epoch,
        failed=plan.failed,
        helpers=helpers,
        per_helper=tuple(1 for _ in helpers),
        total_symbols=len(downloads),
        audit_ok=True,
        family=code.family,
    )
    return NodeShare(plan.failed, rebuilt, generation=epoch), trace


def msr_repair_systematic(
    code: MsrCode, failed: int, survivors, epoch: int = 0
) -> tuple[NodeShare, RepairPlan, RepairTrace]:
    """Exact repair of a systematic node from 2k-1 projected symbols."""
    if not 0 <= failed < code.k:
        raise InvalidRepairError(f"not a systematic node: {failed}")
    plan = code.repair_plan(failed)
    share, trace = _apply_plan(code, plan, survivors, epoch)
    return share, plan, trace


def msr_repair_parity(
    code: MsrCode, failed: int, survivors, epoch: int = 0
) -> tuple[NodeShare, RepairPlan, RepairTrace]:
    """Exact repair of a parity node via the dual-code procedure."""
    if not code.k <= failed < code.n:
        raise InvalidRepairError(f"not a parity node: {failed}")
    plan = code.repair_plan(failed)
    share, trace = _apply_plan(code, plan, survivors, epoch)
    return share, plan, trace


def msr_repair(
    code: MsrCode, failed: int, survivors, epoch: int = 0
) -> tuple[NodeShare, RepairPlan, RepairTrace]:
    """Repair any single node, dispatching on its role."""
    if failed < code.k:
        return msr_repair_systematic(code, failed, survivors, epoch)
    return msr_repair_parity(code, failed, survivors, epoch)


def msr_decode(code: MsrCode, shares) -> list[int]:
    """Recover the k*k stripe symbols from any k nodes' shares."""
    subset = [s.node_id for s in shares]
    return code.decode(subset, [list(s.blocks) for s in shares])


def _golden_candidates(k: int, field: GF):
    if k == 2 and field.q >= 4:
        yield (
            ((1, 0), (0, 1)),
            ((1, 1), (1, 2)),
            2,
        )
    if k == 3 and field.m == 2:
        yield (
            ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
            ((2, 2, 2), (2, 3, 1), (2, 1, 3)),
            2,
        )


def _power_candidate(k: int, field: GF):
    ident = tuple(
        tuple(1 if c == r else 0 for c in range(k)) for r in range(k)
    )
    right = tuple(
        tuple(field.pow(j + 1, s) for s in range(k)) for j in range(k)
    )
    return ident, right, 2


def msr_construct(
    k: int,
    field: GF,
    seed: int = 0,
    max_attempts: int = 200,
) -> MsrCode:
    """Search for a verified instance with 2k nodes over the field.

    Pinned and structured candidates are tried before random draws, so
    small standard cases come out deterministic regardless of seed.
    """
    if k < 2:
        raise UnsupportedCodeError("need k >= 2")
    if field.q < 4:
        # The coupling constant must avoid both 0 and 1.  A field of
        # size 2(n-k) always suffices; smaller ones may still verify.
        raise FieldTooSmallError(
            f"need a field of at least 4 elements, have {field.q}"
        )
    candidates = list(_golden_candidates(k, field))
    if field.q - 1 >= k:
        candidates.append(_power_candidate(k, field))
    attempt = 0
    for left, right, kappa in candidates:
        attempt += 1
        code = MsrCode(k, field, left, right, kappa)
        if code.verify():
            return code
    while attempt < max_attempts:
        rng = random.Random(f"msr:{seed}:{attempt}")
        left = tuple(
            tuple(rng.randrange(field.q) for _ in range(k)) for _ in range(k)
        )
        right = tuple(
            tuple(rng.randrange(field.q) for _ in range(k)) for _ in range(k)
        )
        kappa = rng.randrange(2, field.q)
        attempt += 1
        try:
            code = MsrCode(k, field, left, right, kappa)
            if code.verify():
                return code
        except SingularMatrixError:
            continue
    raise ConstructionFailure(
        f"no verified instance for k={k} over GF(2^{field.m}) "
        f"in {max_attempts} attempts"
    )
