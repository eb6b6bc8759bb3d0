"""Systematic-exact, parity-functional repair from k + 1 helpers.

The file is a vector x of 2k symbols.  Every node i keeps two scalar
symbols of it: an anchor symbol x . u_i and a drift symbol x . v_i.
The 2n direction vectors {u_i, v_i} form an MDS set (every 2k of
them full rank), so any k nodes decode; the first 2k anchors are the
standard basis, which makes the anchor half systematic.

Repair contacts only k + 1 helpers.  Each helper ships one symbol: a
weighted blend a_i (x . u_i) + b_i (x . v_i) of its two.  The blend
weights are chosen so the received symbols sum exactly to the lost
anchor symbol, which therefore comes back bit-identical, forever.
The drift replacement is a random reweighting of the same received
symbols: functional, not exact.  A candidate repair is accepted only
if the refreshed direction set is still MDS, rechecked after every
repair; anchors are never touched.

The blend weights always exist: the Eq-solve has 2(k+1) unknowns
against 2k constraints, a solution space of dimension at least two,
and a random point of it is drawn each attempt.  Over a field larger
than twice the number of (2k-1)-subsets of 2n-1 vectors, a random
attempt almost surely keeps the MDS property; the search retries a
bounded number of times and reports failure honestly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional, Sequence

from .errors import (
    FieldTooSmallError,
    InvalidRepairError,
    RepairSearchFailure,
    UnsupportedCodeError,
)
from .ffmatrix import FieldMatrix, FieldVector, rows_rank
from .galois import GF
from .mdscore import CodeSpec, NodeShare, RepairPlan, make_cauchy_mds
from .trace import RepairTrace

__all__ = [
    "HybridCode",
    "hybrid_init",
    "hybrid_field_floor",
    "hybrid_encode",
    "hybrid_repair",
    "hybrid_decode",
]

# Above this many subsets the post-repair MDS check samples instead of
# enumerating; (4,2) has 70 and (6,3) has 924, both exhaustive.
_EXHAUSTIVE_LAZE = 2500
_SAMPLED_CHECKS = 2000
_SAMPLED_TOUCHING = 500


def hybrid_field_floor(n: int, k: int) -> int:
    """Field sizes must exceed this for repair searches to be safe."""
    return 2 * comb(2 * n - 1, 2 * k - 1)


@dataclass(frozen=True)
class HybridCode:
    """Direction state of the scheme at one epoch."""

    n: int
    k: int
    field: GF
    anchors: tuple[tuple[int, ...], ...]
    drifts: tuple[tuple[int, ...], ...]
    epoch: int = 0

    family = "hybrid"

    @property
    def d(self) -> int:
        return self.k + 1

    @property
    def alpha(self) -> int:
        return 2

    @property
    def beta(self) -> int:
        return 1

    @property
    def message_symbols(self) -> int:
        return 2 * self.k

    @property
    def spec(self) -> CodeSpec:
        return CodeSpec(
            self.n, self.k, self.d, self.alpha, self.beta,
            self.field, self.family,
        )

    def node_rows(self, node: int) -> tuple[tuple[int, ...], ...]:
        return (self.anchors[node], self.drifts[node])

    def all_node_rows(self):
        return tuple(self.node_rows(v) for v in range(self.n))

    def vector_pool(self) -> list[tuple[int, ...]]:
        """All 2n direction vectors, anchors first."""
        return list(self.anchors) + list(self.drifts)

    def mds_ok(self, rng: Optional[random.Random] = None) -> bool:
        """Every 2k-subset of the direction pool has full rank.

        Exhaustive when the subset count is modest; otherwise a seeded
        sample plus extra subsets through the most recent drift.
        """
        pool = self.vector_pool()
        m = self.message_symbols
        total = comb(len(pool), m)
        if total <= _EXHAUSTIVE_LAZE:
            for subset in combinations(range(len(pool)), m):
                if rows_rank(self.field, [pool[i] for i in subset]) != m:
                    return False
            return True
        rng = rng or random.Random("hybrid-mds-sample")
        ids = list(range(len(pool)))
        for _ in range(_SAMPLED_CHECKS):
            subset = rng.sample(ids, m)
            if rows_rank(self.field, [pool[i] for i in subset]) != m:
                return False
        return True

    def _sampled_touching_ok(self, touched: int, rng: random.Random) -> bool:
        pool = self.vector_pool()
        m = self.message_symbols
        if comb(len(pool), m) <= _EXHAUSTIVE_LAZE:
            return True
        rest = [i for i in range(len(pool)) if i != touched]
        for _ in range(_SAMPLED_TOUCHING):
            subset = [touched] + rng.sample(rest, m - 1)
            if rows_rank(self.field, [pool[i] for i in subset]) != m:
                return False
        return True


def hybrid_init(n: int, k: int, field: GF) -> HybridCode:
    """Start from a systematic (2n, 2k) MDS direction set."""
    if n < 2 * k:
        raise UnsupportedCodeError(f"need n >= 2k, got n={n} k={k}")
    floor = hybrid_field_floor(n, k)
    if field.q <= floor:
        raise FieldTooSmallError(
            f"repair searches need a field larger than {floor}, "
            f"have {field.q}"
        )
    gen = make_cauchy_mds(2 * n, 2 * k, field)
    anchors = tuple(tuple(gen.rows[i]) for i in range(n))
    drifts = tuple(tuple(gen.rows[n + i]) for i in range(n))
    return HybridCode(n, k, field, anchors, drifts)


def hybrid_encode(code: HybridCode, data: Sequence[int]) -> list[NodeShare]:
    """Each node's two symbols of the 2k-symbol stripe."""
    if len(data) != code.message_symbols:
        raise ValueError(
            f"expected {code.message_symbols} symbols, got {len(data)}"
        )
    f = code.field
    vec = FieldVector(f, data)
    shares = []
    for i in range(code.n):
        a = FieldVector(f, code.anchors[i]).dot(vec)
        b = FieldVector(f, code.drifts[i]).dot(vec)
        shares.append(NodeShare(i, (a, b), generation=code.epoch))
    return shares


def hybrid_repair(
    code: HybridCode,
    failed: int,
    helpers: Optional[Sequence[int]] = None,
    seed: int = 0,
    max_attempts: int = 64,
) -> tuple[HybridCode, RepairPlan, RepairTrace]:
    """One-symbol downloads from k+1 helpers; anchor restored exactly.

    Returns the refreshed code, the blend/rebuild plan (for replaying
    the same repair on stored payload bytes), and the bandwidth trace.
    """
    f = code.field
    n, k = code.n, code.k
    if not 0 <= failed < n:
        raise InvalidRepairError(f"no such node: {failed}")
    if helpers is None:
        helpers = [i for i in range(n) if i != failed][: k + 1]
    helpers = tuple(helpers)
    if len(helpers) != k + 1:
        raise InvalidRepairError(
            f"need exactly {k + 1} helpers, got {len(helpers)}"
        )
    if failed in helpers or len(set(helpers)) != k + 1:
        raise InvalidRepairError("helpers must be distinct other nodes")

    # Columns of the constraint system: u_h, v_h for each helper.
    cols = []
    for h in helpers:
        cols.append(code.anchors[h])
        cols.append(code.drifts[h])
    m = code.message_symbols
    system = FieldMatrix(
        f, [[cols[c][r] for c in range(len(cols))] for r in range(m)]
    )
    particular = list(system.solve(list(code.anchors[failed])))
    kernel = system.null_space()

    for attempt in range(max_attempts):
        rng = random.Random(f"hybrid:{seed}:{code.epoch}:{failed}:{attempt}")
        weights = list(particular)
        for base in kernel:
            r = rng.randrange(f.q)
            if r:
                for idx, val in enumerate(base):
                    weights[idx] = f.add(weights[idx], f.mul(r, val))
        # Per-helper blended direction a_h u_h + b_h v_h.
        sent_dirs = []
        for pos, h in enumerate(helpers):
            a, b = weights[2 * pos], weights[2 * pos + 1]
            direction = tuple(
                f.add(f.mul(a, code.anchors[h][t]),
                      f.mul(b, code.drifts[h][t]))
                for t in range(m)
            )
            sent_dirs.append(direction)
        acc = [0] * m
        for direction in sent_dirs:
            for t in range(m):
                acc[t] = f.add(acc[t], direction[t])
        if tuple(acc) != code.anchors[failed]:
            raise AssertionError("blend constraint violated; solver bug")
        rho = tuple(rng.randrange(f.q) for _ in range(k + 1))
        new_drift = [0] * m
        for r, direction in zip(rho, sent_dirs):
            if r:
                for t in range(m):
                    new_drift[t] = f.add(new_drift[t],
                                         f.mul(r, direction[t]))
        drifts = list(code.drifts)
        drifts[failed] = tuple(new_drift)
        candidate = HybridCode(
            n, k, f, code.anchors, tuple(drifts), code.epoch + 1
        )
        check_rng = random.Random(f"hybrid-check:{seed}:{code.epoch}:{attempt}")
        if candidate.mds_ok(check_rng) and candidate._sampled_touching_ok(
            n + failed, check_rng
        ):
            downloads = tuple(
                (h, (weights[2 * pos], weights[2 * pos + 1]))
                for pos, h in enumerate(helpers)
            )
            plan = RepairPlan(
                failed,
                downloads,
                (tuple(1 for _ in helpers), rho),
            )
            trace = RepairTrace(
                epoch=code.epoch,
                failed=failed,
                helpers=helpers,
                per_helper=tuple(1 for _ in helpers),
                total_symbols=k + 1,
                audit_ok=True,
                family=code.family,
            )
            return candidate, plan, trace
    raise RepairSearchFailure(
        f"no MDS-preserving repair of node {failed} in "
        f"{max_attempts} attempts"
    )


def hybrid_decode(code: HybridCode, shares: Sequence[NodeShare]) -> list[int]:
    """Solve the 2k x 2k system given by any k nodes' direction rows."""
    if len({s.node_id for s in shares}) != code.k:
        raise ValueError(f"need exactly {code.k} distinct shares")
    rows = []
    rhs = []
    for s in shares:
        rows.append(list(code.anchors[s.node_id]))
        rows.append(list(code.drifts[s.node_id]))
        rhs.extend(s.blocks)
    return list(FieldMatrix(code.field, rows).solve(rhs))
