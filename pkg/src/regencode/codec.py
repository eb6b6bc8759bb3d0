"""Uniform per-family engines over striped byte payloads.

Every family in this package is linear: node v's storage is alpha
known field-linear combinations of the M message symbols.  That makes
one byte-level machine serve them all.  A message symbol is a
contiguous span of W bytes; combining symbols is bytewise XOR plus
per-scalar lookup-table multiplication, so numpy does the heavy
lifting and the field layer only supplies the 256-entry tables.

A StripeCodec adapter exposes the family's current coefficient rows,
produces repair plans and traces, applies them to byte blocks, and
can serialize its mutable state (functional families drift; exact
ones do not).  The file layer and the failure simulator both sit on
this interface.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InvalidRepairError,
    SingularMatrixError,
    UnsupportedCodeError,
)
from .ffmatrix import FieldMatrix
from .galois import GF
from .hybrid import HybridCode, hybrid_init, hybrid_repair
from .mbr import mbr_construct
from .mdscore import (
    EVENODD_ROWS,
    AuditResult,
    CodeSpec,
    RepairPlan,
    audit_mds,
    evenodd_repair_plan,
    make_cauchy_mds,
)
from .msr import msr_construct
from .rlnc import CodedBlock, SystemState, init_random
from .rlnc import repair as rlnc_repair
from .trace import RepairTrace

__all__ = [
    "combine_rows",
    "StripeCodec",
    "CauchyCodec",
    "EvenoddCodec",
    "MbrCodec",
    "MsrCodec",
    "HybridCodec",
    "RlncCodec",
    "build_codec",
    "codec_from_state",
]


def combine_rows(
    field: GF, rows: Sequence[Sequence[int]], blocks: np.ndarray
) -> np.ndarray:
    """Apply an R x B weight matrix to B byte blocks, giving R blocks."""
    if blocks.ndim != 2:
        raise ValueError("blocks must be a 2-D uint8 array")
    out = np.zeros((len(rows), blocks.shape[1]), dtype=np.uint8)
    for r, row in enumerate(rows):
        acc = out[r]
        for b, w in enumerate(row):
            if w == 0:
                continue
            arr = blocks[b]
            if w == 1:
                acc ^= arr
            else:
                acc ^= field.byte_mul_lut(w)[arr]
    return out


def _independent_rows(
    field: GF, rows: Sequence[Sequence[int]], need: int
) -> list[int]:
    """Indices of the first ``need`` linearly independent rows."""
    pivots: list[tuple[int, list[int]]] = []
    keep: list[int] = []
    for idx, row in enumerate(rows):
        r = list(row)
        for col, base in pivots:
            w = r[col]
            if w:
                for j in range(len(r)):
                    r[j] = field.add(r[j], field.mul(w, base[j]))
        p = next((j for j, v in enumerate(r) if v), None)
        if p is None:
            continue
        inv = field.inv(r[p])
        r = [field.mul(inv, v) for v in r]
        pivots.append((p, r))
        keep.append(idx)
        if len(keep) == need:
            return keep
    raise SingularMatrixError(
        f"only {len(keep)} independent rows, need {need}"
    )


class StripeCodec:
    """Shared machinery; subclasses fill in rows and repair plans.

    ``self._rows[v]`` is node v's current coefficient rows (alpha
    tuples of M field elements).  Exact families never change them;
    functional families replace the failed node's rows on commit.
    """

    family = "?"

    def __init__(self, spec: CodeSpec, rows, epoch: int = 0):
        self.spec = spec
        self._rows = [tuple(tuple(r) for r in node) for node in rows]
        self.epoch = epoch

    # -- coefficient views -------------------------------------------------

    def node_rows(self, node: int) -> tuple[tuple[int, ...], ...]:
        return self._rows[node]

    def all_rows(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        return tuple(self._rows)

    @property
    def message_symbols(self) -> int:
        return len(self._rows[0][0])

    def audit(self) -> AuditResult:
        return audit_mds(
            self.all_rows(),
            self.spec.k,
            self.message_symbols,
            self.spec.field,
        )

    # -- repair ------------------------------------------------------------

    def plan_repair(
        self, failed: int, helpers: Optional[Sequence[int]] = None,
        seed: int = 0,
    ) -> tuple[RepairPlan, RepairTrace]:
        raise NotImplementedError

    def commit_repair(self, failed: int, plan: RepairPlan) -> None:
        """Advance the epoch; functional subclasses also swap rows."""
        self.epoch += 1

    def repair_step(
        self, failed: int, helpers: Optional[Sequence[int]] = None,
        seed: int = 0,
    ) -> RepairTrace:
        """Coefficient-level repair (no payloads); used by simulations."""
        plan, trace = self.plan_repair(failed, helpers, seed)
        self.commit_repair(failed, plan)
        return trace

    def repair_bytes(
        self,
        failed: int,
        node_blocks: dict[int, np.ndarray],
        helpers: Optional[Sequence[int]] = None,
        seed: int = 0,
    ) -> tuple[np.ndarray, RepairTrace]:
        """Rebuild the failed node's byte blocks from survivors'."""
        self._check_packing()
        plan, trace = self.plan_repair(failed, helpers, seed)
        f = self.spec.field
        moved = []
        for node, weights in plan.downloads:
            if node not in node_blocks or node_blocks[node] is None:
                raise InvalidRepairError(f"helper {node} has no blocks")
            moved.append(combine_rows(f, [weights], node_blocks[node])[0])
        rebuilt = combine_rows(f, plan.rebuild, np.stack(moved))
        self.commit_repair(failed, plan)
        return rebuilt, trace

    def repair_degraded(
        self, failed: int, node_blocks: dict[int, np.ndarray]
    ) -> tuple[np.ndarray, RepairTrace]:
        """Restore a node by full decode when too few helpers are live.

        Exactly M independent blocks are downloaded, the message is
        recovered, and the node's own rows re-encode its old blocks
        bit-for-bit.  Traffic is the whole-file M, the price of
        dropping below the family's repair degree; rows never change,
        so the audit verdict is whatever it already was.
        """
        self._check_packing()
        f = self.spec.field
        stacked_rows = []
        stacked_blocks = []
        origin = []
        for v in sorted(node_blocks):
            arr = node_blocks[v]
            if arr is None or v == failed:
                continue
            for j, row in enumerate(self._rows[v]):
                stacked_rows.append(row)
                stacked_blocks.append(arr[j])
                origin.append(v)
        m = self.message_symbols
        keep = _independent_rows(f, stacked_rows, m)
        inverse = FieldMatrix(f, [stacked_rows[i] for i in keep]).invert()
        message = combine_rows(
            f, inverse.rows, np.stack([stacked_blocks[i] for i in keep])
        )
        rebuilt = combine_rows(f, self._rows[failed], message)
        helpers = tuple(sorted({origin[i] for i in keep}))
        per_helper = tuple(
            sum(1 for i in keep if origin[i] == h) for h in helpers
        )
        trace = RepairTrace(
            epoch=self.epoch,
            failed=failed,
            helpers=helpers,
            per_helper=per_helper,
            total_symbols=m,
            audit_ok=bool(self.audit()),
            family=self.family,
        )
        self.epoch += 1
        return rebuilt, trace

    # -- encode / decode ---------------------------------------------------

    def encode_bytes(self, message: np.ndarray) -> dict[int, np.ndarray]:
        """Message (M, W) bytes -> per-node (alpha, W) blocks."""
        self._check_packing()
        if message.shape[0] != self.message_symbols:
            raise ValueError(
                f"expected {self.message_symbols} message blocks"
            )
        f = self.spec.field
        return {
            v: combine_rows(f, self._rows[v], message)
            for v in range(self.spec.n)
        }

    def decode_bytes(self, node_blocks: dict[int, np.ndarray]) -> np.ndarray:
        """Any k nodes' blocks -> the (M, W) message bytes."""
        self._check_packing()
        if len(node_blocks) < self.spec.k:
            raise InvalidRepairError(
                f"need at least {self.spec.k} nodes, got {len(node_blocks)}"
            )
        f = self.spec.field
        stacked_rows = []
        stacked_blocks = []
        for v in sorted(node_blocks):
            arr = node_blocks[v]
            for j, row in enumerate(self._rows[v]):
                stacked_rows.append(row)
                stacked_blocks.append(arr[j])
        m = self.message_symbols
        keep = _independent_rows(f, stacked_rows, m)
        square = FieldMatrix(f, [stacked_rows[i] for i in keep])
        inverse = square.invert()
        chosen = np.stack([stacked_blocks[i] for i in keep])
        return combine_rows(f, inverse.rows, chosen)

    # -- persistence -------------------------------------------------------

    def state_dict(self) -> dict:
        s = self.spec
        return {
            "family": self.family,
            "n": s.n,
            "k": s.k,
            "d": s.d,
            "alpha": s.alpha,
            "beta": s.beta,
            "field_bits": s.field.m,
            "epoch": self.epoch,
        }

    def _check_packing(self) -> None:
        if self.spec.field.packed_per_byte() == 0:
            raise UnsupportedCodeError(
                f"byte payloads need a field of 1, 2, 4 or 8 bits, "
                f"not {self.spec.field.m}"
            )

    def _default_helpers(
        self, failed: int, count: int, helpers: Optional[Sequence[int]]
    ) -> tuple[int, ...]:
        if helpers is None:
            helpers = [v for v in range(self.spec.n) if v != failed][:count]
        helpers = tuple(helpers)
        if len(helpers) != count or failed in helpers:
            raise InvalidRepairError(
                f"need {count} helpers excluding node {failed}"
            )
        if len(set(helpers)) != count:
            raise InvalidRepairError("helpers must be distinct")
        return helpers


class CauchyCodec(StripeCodec):
    """Baseline MDS store; repair is a full decode re-encode.

    With s stripes each node keeps s symbols (one per stripe) and a
    repair downloads all k x s survivor symbols: the whole file.  The
    contrast against the regenerating families is the point.
    """

    family = "cauchy-mds"

    def __init__(self, n: int, k: int, field: GF, stripes: int = 1,
                 epoch: int = 0):
        if stripes < 1:
            raise ValueError("stripes must be positive")
        base = make_cauchy_mds(n, k, field).rows
        m = k * stripes
        rows = []
        for v in range(n):
            node = []
            for s in range(stripes):
                row = [0] * m
                row[s * k:(s + 1) * k] = list(base[v])
                node.append(tuple(row))
            rows.append(tuple(node))
        spec = CodeSpec(n, k, k, stripes, stripes, field, self.family)
        super().__init__(spec, rows, epoch)
        self._base = base
        self._stripes = stripes

    def plan_repair(self, failed, helpers=None, seed=0):
        k = self.spec.k
        helpers = self._default_helpers(failed, k, helpers)
        f = self.spec.field
        s = self._stripes
        # c solves sum_i c_i * base[h_i] = base[failed]
        transposed = [
            [self._base[h][t] for h in helpers] for t in range(k)
        ]
        c = list(FieldMatrix(f, transposed).solve(list(self._base[failed])))
        downloads = []
        for h in helpers:
            for j in range(s):
                unit = [0] * s
                unit[j] = 1
                downloads.append((h, tuple(unit)))
        rebuild = []
        for j in range(s):
            row = [0] * (k * s)
            for i in range(k):
                row[i * s + j] = c[i]
            rebuild.append(tuple(row))
        plan = RepairPlan(failed, tuple(downloads), tuple(rebuild))
        trace = RepairTrace(
            epoch=self.epoch,
            failed=failed,
            helpers=helpers,
            per_helper=tuple(s for _ in helpers),
            total_symbols=k * s,
            audit_ok=True,
            family=self.family,
        )
        return plan, trace

    def state_dict(self):
        d = super().state_dict()
        d["stripes"] = self._stripes
        return d


class EvenoddCodec(StripeCodec):
    """The fixed (4,2) array code over GF(2)."""

    family = "evenodd42"

    def __init__(self, field: Optional[GF] = None, epoch: int = 0):
        field = field or GF(1)
        if field.m != 1:
            raise UnsupportedCodeError("this family lives over GF(2)")
        spec = CodeSpec(4, 2, 3, 2, 1, field, self.family)
        super().__init__(spec, EVENODD_ROWS, epoch)

    def plan_repair(self, failed, helpers=None, seed=0):
        plan = evenodd_repair_plan(failed)
        fixed = tuple(node for node, _ in plan.downloads)
        if helpers is not None and tuple(helpers) != fixed:
            raise InvalidRepairError(
                f"repair of node {failed} uses helpers {fixed}"
            )
        trace = RepairTrace(
            epoch=self.epoch,
            failed=failed,
            helpers=fixed,
            per_helper=tuple(1 for _ in fixed),
            total_symbols=len(fixed),
            audit_ok=True,
            family=self.family,
        )
        return plan, trace


class MbrCodec(StripeCodec):
    """Repair-by-transfer pair placement at the minimum-bandwidth point."""

    family = "exact-mbr"

    def __init__(self, n: int, k: int, field: GF, epoch: int = 0):
        self.layout = mbr_construct(n, k, field)
        super().__init__(self.layout.spec, self.layout.all_node_rows(), epoch)

    def plan_repair(self, failed, helpers=None, seed=0):
        plan = self.layout.repair_plan(failed)
        fixed = tuple(node for node, _ in plan.downloads)
        if helpers is not None and set(helpers) != set(fixed):
            raise InvalidRepairError(
                "repair-by-transfer needs every other node as helper"
            )
        trace = RepairTrace(
            epoch=self.epoch,
            failed=failed,
            helpers=fixed,
            per_helper=tuple(1 for _ in fixed),
            total_symbols=len(fixed),
            audit_ok=True,
            family=self.family,
        )
        return plan, trace


class MsrCodec(StripeCodec):
    """Interference-aligned minimum-storage code, n = 2k."""

    family = "exact-msr"

    def __init__(self, k: int, field: GF, seed: int = 0, epoch: int = 0):
        self.code = msr_construct(k, field, seed=seed)
        self.construct_seed = seed
        super().__init__(self.code.spec, self.code.all_node_rows(), epoch)

    def plan_repair(self, failed, helpers=None, seed=0):
        plan = self.code.repair_plan(failed)
        fixed = tuple(node for node, _ in plan.downloads)
        if helpers is not None and set(helpers) != set(fixed):
            raise InvalidRepairError(
                "aligned repair needs every other node as helper"
            )
        trace = RepairTrace(
            epoch=self.epoch,
            failed=failed,
            helpers=fixed,
            per_helper=tuple(1 for _ in fixed),
            total_symbols=len(fixed),
            audit_ok=True,
            family=self.family,
        )
        return plan, trace

    def state_dict(self):
        d = super().state_dict()
        d["seed"] = self.construct_seed
        return d


class HybridCodec(StripeCodec):
    """Systematic-exact scheme whose parity directions drift."""

    family = "hybrid"

    def __init__(self, n: int, k: int, field: GF,
                 code: Optional[HybridCode] = None):
        self.code = code or hybrid_init(n, k, field)
        super().__init__(
            self.code.spec, self.code.all_node_rows(), self.code.epoch
        )

    def plan_repair(self, failed, helpers=None, seed=0):
        helpers = self._default_helpers(failed, self.spec.k + 1, helpers)
        new_code, plan, trace = hybrid_repair(
            self.code, failed, helpers, seed=seed
        )
        self._pending = new_code
        return plan, trace

    def commit_repair(self, failed, plan):
        self.code = self._pending
        del self._pending
        self._rows[failed] = self.code.node_rows(failed)
        self.epoch = self.code.epoch

    def state_dict(self):
        d = super().state_dict()
        d["anchors"] = [list(u) for u in self.code.anchors]
        d["drifts"] = [list(v) for v in self.code.drifts]
        return d


class RlncCodec(StripeCodec):
    """Fully random placement; rows are whatever the draws produced."""

    family = "rlnc-functional"

    def __init__(self, n: int, k: int, d: int, field: GF,
                 alpha: Optional[int] = None, beta: int = 1,
                 seed: int = 0, state: Optional[SystemState] = None):
        if alpha is None:
            alpha = d - k + 1
        spec = CodeSpec(n, k, d, alpha, beta, field, self.family)
        self.state = state or init_random(
            spec, spec.k * spec.alpha, seed=seed
        )
        super().__init__(
            spec, self.state.coefficient_rows(), self.state.epoch
        )

    def plan_repair(self, failed, helpers=None, seed=0):
        raise NotImplementedError(
            "random coding has no fixed plan; use repair_step/repair_bytes"
        )

    def repair_step(self, failed, helpers=None, seed=0):
        new_state, trace = rlnc_repair(
            self.state, failed, helpers, seed=seed
        )
        self.state = new_state
        self._rows[failed] = tuple(
            blk.coeffs for blk in new_state.nodes[failed]
        )
        self.epoch = new_state.epoch
        return trace

    def repair_bytes(self, failed, node_blocks, helpers=None, seed=0):
        self._check_packing()
        self._inject_payloads(node_blocks)
        trace = self.repair_step(failed, helpers, seed)
        width = len(self.state.nodes[failed][0].payload)
        out = np.zeros((self.spec.alpha, width), dtype=np.uint8)
        for j, blk in enumerate(self.state.nodes[failed]):
            out[j] = np.frombuffer(blk.payload, dtype=np.uint8)
        return out, trace

    def encode_bytes(self, message):
        self._check_packing()
        chunks = [message[i].tobytes() for i in range(message.shape[0])]
        fresh = init_random(self.spec, chunks, seed=self._encode_seed())
        self.state = SystemState(self.spec, fresh.nodes, self.state.epoch)
        for v in range(self.spec.n):
            self._rows[v] = tuple(b.coeffs for b in self.state.nodes[v])
        return {
            v: np.stack([
                np.frombuffer(b.payload, dtype=np.uint8)
                for b in self.state.nodes[v]
            ])
            for v in range(self.spec.n)
        }

    def _encode_seed(self) -> int:
        # reuse the draw that produced the current coefficients
        return getattr(self, "_seed", 0)

    def _inject_payloads(self, node_blocks: dict[int, np.ndarray]) -> None:
        nodes = []
        for v in range(self.spec.n):
            per = []
            arr = node_blocks.get(v)
            for j, blk in enumerate(self.state.nodes[v]):
                payload = arr[j].tobytes() if arr is not None else None
                per.append(CodedBlock(blk.coeffs, payload))
            nodes.append(tuple(per))
        self.state = SystemState(self.spec, tuple(nodes), self.state.epoch)

    def state_dict(self):
        d = super().state_dict()
        d["rows"] = [
            [list(b.coeffs) for b in node] for node in self.state.nodes
        ]
        return d


def build_codec(
    family: str,
    n: int = 0,
    k: int = 0,
    d: int = 0,
    field: Optional[GF] = None,
    seed: int = 0,
    stripes: int = 1,
    alpha: Optional[int] = None,
    beta: int = 1,
) -> StripeCodec:
    """Construct a fresh codec from CLI-shaped parameters."""
    if family == "cauchy-mds":
        return CauchyCodec(n, k, field or GF(8), stripes)
    if family == "evenodd42":
        return EvenoddCodec(field)
    if family == "exact-mbr":
        return MbrCodec(n, k, field or GF(8))
    if family == "exact-msr":
        return MsrCodec(k, field or GF(8), seed=seed)
    if family == "hybrid":
        return HybridCodec(n, k, field or GF(8))
    if family == "rlnc-functional":
        if not d:
            d = n - 1
        codec = RlncCodec(n, k, d, field or GF(8), alpha=alpha, beta=beta,
                          seed=seed)
        codec._seed = seed
        return codec
    raise UnsupportedCodeError(f"unknown family: {family}")


def codec_from_state(state: dict) -> StripeCodec:
    """Rebuild a codec from a state_dict, drifted rows included."""
    family = state["family"]
    field = GF(state["field_bits"])
    epoch = state.get("epoch", 0)
    if family == "cauchy-mds":
        return CauchyCodec(state["n"], state["k"], field,
                           state.get("stripes", 1), epoch)
    if family == "evenodd42":
        return EvenoddCodec(field, epoch)
    if family == "exact-mbr":
        return MbrCodec(state["n"], state["k"], field, epoch)
    if family == "exact-msr":
        return MsrCodec(state["k"], field, seed=state.get("seed", 0),
                        epoch=epoch)
    if family == "hybrid":
        code = HybridCode(
            state["n"], state["k"], field,
            tuple(tuple(u) for u in state["anchors"]),
            tuple(tuple(v) for v in state["drifts"]),
            epoch,
        )
        return HybridCodec(state["n"], state["k"], field, code)
    if family == "rlnc-functional":
        spec = CodeSpec(state["n"], state["k"], state["d"], state["alpha"],
                        state["beta"], field, family)
        nodes = tuple(
            tuple(CodedBlock(tuple(c)) for c in node)
            for node in state["rows"]
        )
        sys_state = SystemState(spec, nodes, epoch)
        return RlncCodec(state["n"], state["k"], state["d"], field,
                         alpha=state["alpha"], beta=state["beta"],
                         state=sys_state)
    raise UnsupportedCodeError(f"unknown family: {family}")
