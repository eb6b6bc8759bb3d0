"""Random linear coding with functional repair.

Every node stores alpha random combinations of the k*alpha message
symbols.  Each combination is a CodedBlock: the coefficient vector
that defines it, plus (optionally) the evaluated payload bytes when
real data is attached.  Nothing structural is maintained: a repair
has each helper ship one fresh random combination of its blocks and
the newcomer remixes what it received.  Whether any k nodes can still
decode is a property of the random draws, checked by audit rather
than guaranteed by design.

Draw discipline: coefficient vectors are metadata, orders of
magnitude smaller than the payloads they describe.  So a repair first
settles its coefficients (helper combination weights and the
newcomer's mix), audits the would-be system state, and redraws on
failure, a bounded number of times.  Only then do the d payload
symbols actually move.  Bandwidth is therefore always exactly d*beta
per repair; what degrades on an unlucky field is the audit verdict,
not the traffic.  Over GF(256) a handful of redraws makes failure
essentially unobservable, while over GF(2) repairs visibly go bad,
which is the point of the contrast.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidRepairError
from .galois import GF
from .mdscore import AuditResult, CodeSpec, audit_mds
from .trace import RepairTrace

__all__ = [
    "CodedBlock",
    "SystemState",
    "init_random",
    "repair",
    "audit",
]


def _rng(seed, *parts) -> random.Random:
    return random.Random(":".join(str(p) for p in (seed,) + tuple(parts)))


@dataclass(frozen=True)
class CodedBlock:
    """One stored combination: its coefficients, maybe its bytes."""

    coeffs: tuple[int, ...]
    payload: Optional[bytes] = None


@dataclass(frozen=True)
class SystemState:
    """All n nodes' coded blocks at one repair epoch."""

    spec: CodeSpec
    nodes: tuple[tuple[CodedBlock, ...], ...]
    epoch: int = 0

    @property
    def message_symbols(self) -> int:
        return self.spec.k * self.spec.alpha

    def coefficient_rows(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        return tuple(
            tuple(b.coeffs for b in node) for node in self.nodes
        )

    def audit(self) -> AuditResult:
        return audit_mds(
            self.coefficient_rows(),
            self.spec.k,
            self.message_symbols,
            self.spec.field,
        )


def audit(state: SystemState) -> bool:
    """True iff every k-subset of nodes still has full decoding rank."""
    return bool(state.audit())


def _combine(
    field: GF,
    weights: Sequence[int],
    blocks: Sequence[CodedBlock],
    width: int,
) -> CodedBlock:
    """Weighted sum of coded blocks, payloads included when present."""
    coeffs = [0] * width
    for w, blk in zip(weights, blocks):
        for j, c in enumerate(blk.coeffs):
            coeffs[j] = field.add(coeffs[j], field.mul(w, c))
    payload = None
    if all(blk.payload is not None for blk in blocks):
        acc = np.zeros(len(blocks[0].payload), dtype=np.uint8)
        for w, blk in zip(weights, blocks):
            if w == 0:
                continue
            arr = np.frombuffer(blk.payload, dtype=np.uint8)
            acc ^= arr if w == 1 else field.byte_mul_lut(w)[arr]
        payload = acc.tobytes()
    return CodedBlock(tuple(coeffs), payload)


def init_random(
    spec: CodeSpec,
    message,
    seed: int = 0,
    max_draws: int = 64,
) -> SystemState:
    """Fresh random placement over k*alpha message symbols.

    ``message`` is either the symbol count (coefficients only) or the
    k*alpha message chunks themselves as equal-length bytes, in which
    case every coded block also carries its evaluated payload.

    Coefficients are drawn, audited, and redrawn a bounded number of
    times; the final draw is returned either way, so on tiny fields
    the returned state may fail its audit.  That is observable, not
    exceptional: it is the small-field effect callers measure.
    """
    if spec.family != "rlnc-functional":
        raise ValueError(f"wrong family for this engine: {spec.family}")
    chunks = None
    if isinstance(message, int):
        message_symbols = message
    else:
        chunks = [bytes(c) for c in message]
        message_symbols = len(chunks)
        if len({len(c) for c in chunks}) > 1:
            raise ValueError("message chunks must have equal length")
    if message_symbols != spec.k * spec.alpha:
        raise ValueError(
            f"message symbol count must be k*alpha = "
            f"{spec.k * spec.alpha}, got {message_symbols}"
        )
    field = spec.field
    state = None
    coeff_rows = None
    for draw in range(max_draws):
        rng = _rng(seed, "init", draw)
        coeff_rows = [
            [
                tuple(rng.randrange(field.q) for _ in range(message_symbols))
                for _ in range(spec.alpha)
            ]
            for _ in range(spec.n)
        ]
        nodes = tuple(
            tuple(CodedBlock(c) for c in per_node)
            for per_node in coeff_rows
        )
        state = SystemState(spec, nodes)
        if state.audit():
            break
    if chunks is not None:
        width = len(chunks[0])
        nodes = tuple(
            tuple(
                CodedBlock(c, _evaluate(field, c, chunks, width))
                for c in per_node
            )
            for per_node in coeff_rows
        )
        state = SystemState(spec, nodes)
    return state


def _evaluate(
    field: GF, coeffs: Sequence[int], chunks: Sequence[bytes], width: int
) -> bytes:
    acc = np.zeros(width, dtype=np.uint8)
    for w, chunk in zip(coeffs, chunks):
        if w == 0:
            continue
        arr = np.frombuffer(chunk, dtype=np.uint8)
        acc ^= arr if w == 1 else field.byte_mul_lut(w)[arr]
    return acc.tobytes()


def repair(
    state: SystemState,
    failed: int,
    helpers: Optional[Sequence[int]] = None,
    seed: int = 0,
    max_draws: int = 8,
) -> tuple[SystemState, RepairTrace]:
    """Replace one node from d helpers' random combinations.

    Each helper contributes beta fresh combinations of its blocks;
    the newcomer stores alpha mixes of everything received.  The
    coefficient draws are audited and redrawn up to ``max_draws``
    times before payloads move; the last draw is committed regardless
    and the audit verdict lands in the trace.
    """
    spec = state.spec
    if not 0 <= failed < spec.n:
        raise InvalidRepairError(f"no such node: {failed}")
    if helpers is None:
        helpers = [i for i in range(spec.n) if i != failed][: spec.d]
    helpers = tuple(helpers)
    if len(helpers) != spec.d:
        raise InvalidRepairError(
            f"need exactly {spec.d} helpers, got {len(helpers)}"
        )
    if failed in helpers or len(set(helpers)) != spec.d:
        raise InvalidRepairError("helpers must be distinct live nodes")

    field = spec.field
    width = state.message_symbols
    best = None
    for draw in range(max_draws):
        rng = _rng(seed, state.epoch, failed, draw)
        sends = []
        for h in helpers:
            for _ in range(spec.beta):
                while True:
                    w = tuple(
                        rng.randrange(field.q) for _ in range(spec.alpha)
                    )
                    if any(w):
                        break
                sends.append((h, w))
        mix = [
            [rng.randrange(field.q) for _ in range(len(sends))]
            for _ in range(spec.alpha)
        ]
        candidate_rows = []
        received_coeffs = []
        for h, w in sends:
            rec = [0] * width
            for wc, blk in zip(w, state.nodes[h]):
                for j, c in enumerate(blk.coeffs):
                    rec[j] = field.add(rec[j], field.mul(wc, c))
            received_coeffs.append(tuple(rec))
        for mrow in mix:
            row = [0] * width
            for mc, rec in zip(mrow, received_coeffs):
                for j, c in enumerate(rec):
                    row[j] = field.add(row[j], field.mul(mc, c))
            candidate_rows.append(tuple(row))
        rows = list(state.coefficient_rows())
        rows[failed] = tuple(candidate_rows)
        ok = bool(
            audit_mds(rows, spec.k, width, field)
        )
        best = (sends, mix, ok)
        if ok:
            break
    sends, mix, ok = best

    # Coefficients are settled; now the payload symbols move, once.
    received = [
        _combine(field, w, state.nodes[h], width) for h, w in sends
    ]
    new_blocks = tuple(
        _combine(field, mrow, received, width) for mrow in mix
    )
    nodes = list(state.nodes)
    nodes[failed] = new_blocks
    new_state = SystemState(spec, tuple(nodes), state.epoch + 1)
    per_helper = tuple(spec.beta for _ in helpers)
    trace = RepairTrace(
        epoch=state.epoch,
        failed=failed,
        helpers=helpers,
        per_helper=per_helper,
        total_symbols=spec.d * spec.beta,
        audit_ok=ok,
        family=spec.family,
    )
    return new_state, trace
