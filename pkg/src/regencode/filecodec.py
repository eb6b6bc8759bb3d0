"""Striping real files across share files on disk.

A store is a directory: one container file per node plus a JSON
sidecar carrying the codec state (coefficient rows for the drifting
families, construction seeds for the deterministic ones) and a CSV
log of every repair.  The original byte length rides as a little-
endian u64 prefix inside the coded stream, so decode truncates the
zero padding exactly.

The stream is cut into M equal contiguous spans, one per message
symbol; node shares are the family's alpha combinations of those.
Repairs run the family's native plan whenever enough helpers hold
shares, and fall back to a metered full decode when the failure
count has eaten into the repair degree.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .codec import StripeCodec, codec_from_state
from .errors import InvalidRepairError, ShareFormatError
from .sharefile import Share, read_share, write_share
from .trace import CSV_HEADER, RepairTrace

__all__ = ["FileStore", "encode_file", "load_store"]

STATE_FILE = "state.json"
TRACE_FILE = "traces.csv"


def _share_path(root: Path, node: int) -> Path:
    return root / f"node_{node}.rgsh"


def encode_file(data: bytes, codec: StripeCodec, out_dir) -> "FileStore":
    """Split ``data`` into n share files under ``out_dir``."""
    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    stream = struct.pack("<Q", len(data)) + data
    m = codec.message_symbols
    width = max(1, -(-len(stream) // m))
    stream = stream.ljust(m * width, b"\0")
    message = np.frombuffer(stream, dtype=np.uint8).reshape(m, width)
    blocks = codec.encode_bytes(message)
    store = FileStore(root, codec, width)
    for v in range(codec.spec.n):
        store._write_node(v, blocks[v])
    store._write_state()
    trace_path = root / TRACE_FILE
    if not trace_path.exists():
        trace_path.write_text(CSV_HEADER + "\n")
    return store


def load_store(out_dir) -> "FileStore":
    root = Path(out_dir)
    state = json.loads((root / STATE_FILE).read_text())
    codec = codec_from_state(state["codec"])
    return FileStore(root, codec, state["symbol_bytes"])


class FileStore:
    """One encoded file's shares, state, and repair log on disk."""

    def __init__(self, root: Path, codec: StripeCodec, width: int):
        self.root = Path(root)
        self.codec = codec
        self.width = width

    @property
    def spec(self):
        return self.codec.spec

    def live_nodes(self) -> list[int]:
        return [
            v for v in range(self.spec.n)
            if _share_path(self.root, v).exists()
        ]

    def share_path(self, node: int) -> Path:
        return _share_path(self.root, node)

    def read_blocks(self, node: int) -> np.ndarray:
        share = read_share(_share_path(self.root, node))
        s = self.spec
        if (share.family, share.n, share.k) != (self.codec.family, s.n, s.k):
            raise ShareFormatError(
                f"share {node} belongs to a different store"
            )
        if share.symbol_size != self.width or share.alpha != s.alpha:
            raise ShareFormatError(f"share {node} has the wrong geometry")
        arr = np.frombuffer(share.payload, dtype=np.uint8)
        return arr.reshape(s.alpha, self.width)

    def _write_node(self, node: int, blocks: np.ndarray) -> None:
        s = self.spec
        share = Share(
            family=self.codec.family,
            n=s.n,
            k=s.k,
            d=s.d,
            field_bits=s.field.m,
            node_id=node,
            generation=self.codec.epoch,
            alpha=s.alpha,
            symbol_size=self.width,
            payload=blocks.tobytes(),
        )
        write_share(_share_path(self.root, node), share)

    def _write_state(self) -> None:
        payload = {
            "codec": self.codec.state_dict(),
            "symbol_bytes": self.width,
        }
        (self.root / STATE_FILE).write_text(
            json.dumps(payload, indent=1) + "\n"
        )

    def _append_trace(self, trace: RepairTrace) -> None:
        path = self.root / TRACE_FILE
        if not path.exists():
            path.write_text(CSV_HEADER + "\n")
        with path.open("a") as fh:
            fh.write(trace.csv_line() + "\n")

    def _native_helpers(self, failed: int, live: list[int]) -> Optional[list[int]]:
        """Helper set for a native repair, or None if under-provisioned."""
        s = self.spec
        family = self.codec.family
        others = [v for v in live if v != failed]
        if family in ("exact-mbr", "exact-msr", "evenodd42"):
            # these plans want every other node
            return others if len(others) == s.n - 1 else None
        need = s.k + 1 if family == "hybrid" else s.d
        if family == "cauchy-mds":
            need = s.k
        return others[:need] if len(others) >= need else None

    def repair(
        self,
        failed: int,
        helpers: Optional[Sequence[int]] = None,
        seed: int = 0,
    ) -> RepairTrace:
        """Rebuild node ``failed``'s share file and log the traffic."""
        live = self.live_nodes()
        if failed in live:
            live.remove(failed)
        if len(live) < self.spec.k:
            raise InvalidRepairError(
                f"only {len(live)} live shares; data is gone below k"
            )
        chosen = list(helpers) if helpers is not None else None
        if chosen is None:
            chosen = self._native_helpers(failed, live)
        blocks = {v: self.read_blocks(v) for v in live}
        if chosen is not None:
            rebuilt, trace = self.codec.repair_bytes(
                failed, blocks, chosen, seed=seed
            )
        else:
            rebuilt, trace = self.codec.repair_degraded(failed, blocks)
        self._write_node(failed, rebuilt)
        self._write_state()
        self._append_trace(trace)
        return trace

    def decode(self, nodes: Optional[Sequence[int]] = None) -> bytes:
        """Reassemble the original bytes from any k share files."""
        if nodes is None:
            nodes = self.live_nodes()[: self.spec.k]
        blocks = {v: self.read_blocks(v) for v in nodes}
        message = self.codec.decode_bytes(blocks)
        stream = message.tobytes()
        (length,) = struct.unpack_from("<Q", stream)
        if length > len(stream) - 8:
            raise ShareFormatError("length prefix exceeds decoded stream")
        return stream[8:8 + length]

    def verify(self) -> tuple[bool, str]:
        """Check share containers and the MDS audit of current rows."""
        problems = []
        for v in self.live_nodes():
            try:
                self.read_blocks(v)
            except ShareFormatError as exc:
                problems.append(f"node {v}: {exc}")
        audit = self.codec.audit()
        if not audit:
            problems.append(f"audit failed for subset {audit.failing}")
        if problems:
            return False, "; ".join(problems)
        return True, (
            f"{len(self.live_nodes())}/{self.spec.n} shares present, "
            f"audit clean"
        )
