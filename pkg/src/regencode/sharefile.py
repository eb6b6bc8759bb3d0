"""On-disk container for coded shares.

A share file is a fixed little-endian header, the payload bytes, and a
trailing CRC-32 over everything before it:

    magic "RGSH" | version u8 | family u8 | n u8 | k u8 | d u8
    | field-bits u8 | node u8 | generation u32 | alpha u16
    | symbol-size u32 | payload-length u64 | payload | crc32 u32

``symbol-size`` is the stripe chunk size in bytes used when the file
was split.  Node id 255 is reserved for state sidecars: parameter
blobs a code family needs beyond the raw shares (serialized as JSON
payloads by the callers that use them).
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

from .errors import ShareFormatError

__all__ = [
    "FAMILY_IDS",
    "FAMILY_NAMES",
    "STATE_NODE_ID",
    "Share",
    "pack_share",
    "unpack_share",
    "write_share",
    "read_share",
]

_MAGIC = b"RGSH"
_VERSION = 1
_HEADER = struct.Struct("<4s7BIHIQ")

FAMILY_IDS = {
    "cauchy-mds": 0,
    "evenodd42": 1,
    "exact-mbr": 2,
    "exact-msr": 3,
    "hybrid": 4,
    "rlnc-functional": 5,
}
FAMILY_NAMES = {v: n for n, v in FAMILY_IDS.items()}

STATE_NODE_ID = 255


@dataclass(frozen=True)
class Share:
    family: str
    n: int
    k: int
    d: int
    field_bits: int
    node_id: int
    generation: int
    alpha: int
    symbol_size: int
    payload: bytes

    @property
    def is_state(self) -> bool:
        return self.node_id == STATE_NODE_ID


def pack_share(share: Share) -> bytes:
    if share.family not in FAMILY_IDS:
        raise ShareFormatError(f"unknown family {share.family!r}")
    header = _HEADER.pack(
        _MAGIC,
        _VERSION,
        FAMILY_IDS[share.family],
        share.n,
        share.k,
        share.d,
        share.field_bits,
        share.node_id,
        share.generation,
        share.alpha,
        share.symbol_size,
        len(share.payload),
    )
    body = header + share.payload
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def unpack_share(data: bytes) -> Share:
    if len(data) < _HEADER.size + 4:
        raise ShareFormatError("share file truncated")
    (magic, version, family_id, n, k, d, bits, node_id,
     generation, alpha, symbol_size, length) = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ShareFormatError("bad magic, not a share file")
    if version != _VERSION:
        raise ShareFormatError(f"unsupported share version {version}")
    if family_id not in FAMILY_NAMES:
        raise ShareFormatError(f"unknown family id {family_id}")
    end = _HEADER.size + length
    if len(data) != end + 4:
        raise ShareFormatError(
            f"length mismatch: header promises {length} payload bytes"
        )
    (crc,) = struct.unpack_from("<I", data, end)
    if crc != zlib.crc32(data[:end]) & 0xFFFFFFFF:
        raise ShareFormatError("checksum mismatch, share is corrupt")
    return Share(
        family=FAMILY_NAMES[family_id],
        n=n, k=k, d=d,
        field_bits=bits,
        node_id=node_id,
        generation=generation,
        alpha=alpha,
        symbol_size=symbol_size,
        payload=data[_HEADER.size:end],
    )


def write_share(path, share: Share) -> None:
    with open(path, "wb") as fh:
        fh.write(pack_share(share))


def read_share(path) -> Share:
    with open(path, "rb") as fh:
        return unpack_share(fh.read())
