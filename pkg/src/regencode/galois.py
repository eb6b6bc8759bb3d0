"""Arithmetic in binary extension fields GF(2^m).

Field elements are plain Python ints in ``[0, 2^m)`` interpreted as
polynomials over GF(2); the integer's bit ``i`` is the coefficient of
``x^i``.  Addition is XOR.  Multiplication is polynomial product
reduced by an irreducible modulus, implemented by shift-and-reduce.
Small fields (``m <= 8``) additionally build a full product table as a
speedup; the table is generated from the shift-reduce routine itself so
the two can never disagree.  Larger fields use discrete-log tables
built on a searched generator and are checked against shift-reduce in
the test suite.

A :class:`GF` instance is the field spec (degree and modulus).  Two
specs compare equal iff both match.  :class:`FieldElement` is a thin
value wrapper that refuses to mix elements of different specs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CodingError, FieldMismatchError

# Irreducible moduli used when the caller does not name one.  The m=2,
# m=4 and m=8 entries are fixed by compatibility with the rest of the
# package (tests pin GF(4) products to x^2+x+1 and byte arithmetic to
# x^8+x^4+x^3+x+1); the others follow the usual tables.
DEFAULT_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0b100011011,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}

MAX_DEGREE = 16


def poly_degree(p: int) -> int:
    """Degree of a GF(2) polynomial given as a bitmask (-1 for zero)."""
    return p.bit_length() - 1


def poly_mod(a: int, b: int) -> int:
    """Remainder of GF(2) polynomial division a mod b."""
    db = poly_degree(b)
    while poly_degree(a) >= db:
        a ^= b << (poly_degree(a) - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..m//2."""
    m = poly_degree(poly)
    if m < 1:
        return False
    for deg in range(1, m // 2 + 1):
        for cand in range(1 << deg, 1 << (deg + 1)):
            if poly_mod(poly, cand) == 0:
                return False
    return True


class GF:
    """A binary extension field GF(2^m) with a fixed modulus."""

    def __init__(self, m: int, poly: int | None = None):
        if not 1 <= m <= MAX_DEGREE:
            raise CodingError(f"extension degree must be in 1..{MAX_DEGREE}, got {m}")
        if poly is None:
            poly = DEFAULT_POLYS[m]
        if poly_degree(poly) != m:
            raise CodingError(
                f"modulus 0b{poly:b} has degree {poly_degree(poly)}, expected {m}"
            )
        if not is_irreducible(poly):
            raise CodingError(f"modulus 0b{poly:b} is reducible")
        self.m = m
        self.poly = poly
        self.q = 1 << m
        self._mul_table: list[int] | None = None
        self._inv_table: list[int] | None = None
        self._log: list[int] | None = None
        self._exp: list[int] | None = None
        self._byte_luts: dict[int, "object"] = {}

    # -- identity ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GF) and (self.m, self.poly) == (other.m, other.poly)

    def __hash__(self) -> int:
        return hash((self.m, self.poly))

    def __repr__(self) -> str:
        return f"GF(2^{self.m}, poly=0x{self.poly:x})"

    # -- scalar arithmetic on ints -----------------------------------

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise CodingError(f"{a} is outside [0, {self.q})")
        return a

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul_slow(self, a: int, b: int) -> int:
        """Reference shift-and-reduce product, no tables involved."""
        self.check(a)
        self.check(b)
        acc = 0
        while b:
            if b & 1:
                acc ^= a
            b >>= 1
            a <<= 1
            if a & self.q:
                a ^= self.poly
        return acc

    def mul(self, a: int, b: int) -> int:
        if self.m <= 8:
            tab = self._mul_table
            if tab is None:
                tab = self._build_mul_table()
            return tab[(a << self.m) | b]
        log = self._log
        if log is None:
            log = self._build_log_tables()
        if a == 0 or b == 0:
            return 0
        return self._exp[log[a] + log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.m <= 8:
            tab = self._inv_table
            if tab is None:
                tab = self._build_inv_table()
            return tab[a]
        log = self._log
        if log is None:
            log = self._build_log_tables()
        e = (self.q - 1 - log[a]) % (self.q - 1)
        return self._exp[e]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a = self.inv(a)
            e = -e
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, a)
            a = self.mul(a, a)
            e >>= 1
        return out

    # -- table construction ------------------------------------------

    def _build_mul_table(self) -> list[int]:
        q = self.q
        tab = [0] * (q * q)
        for a in range(q):
            base = a << self.m
            for b in range(q):
                tab[base | b] = self.mul_slow(a, b)
        self._mul_table = tab
        return tab

    def _build_inv_table(self) -> list[int]:
        tab = [0] * self.q
        for a in range(1, self.q):
            for b in range(1, self.q):
                if self.mul(a, b) == 1:
                    tab[a] = b
                    break
        self._inv_table = tab
        return tab

    def _build_log_tables(self) -> list[int]:
        q = self.q
        # The multiplicative group is cyclic, so some element generates
        # it even when x itself does not.
        for g in range(2, q):
            exp = [0] * (2 * q)
            log = [0] * q
            cur = 1
            ok = True
            for i in range(q - 1):
                if cur == 1 and i > 0:
                    ok = False
                    break
                exp[i] = cur
                log[cur] = i
                cur = self.mul_slow(cur, g)
            if ok and cur == 1:
                for i in range(q - 1, 2 * q):
                    exp[i] = exp[i - (q - 1)]
                self._exp = exp
                self._log = log
                return log
        raise CodingError("no generator found")  # pragma: no cover

    # -- element helpers ---------------------------------------------

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self.check(value), self)

    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    # -- bulk byte arithmetic (used by the file codec) ----------------

    def packed_per_byte(self) -> int:
        """How many field symbols one byte carries, or 0 if unsupported.

        Only degrees dividing 8 pack cleanly; the file codec rejects
        other fields.
        """
        return 8 // self.m if self.m in (1, 2, 4, 8) else 0

    def byte_mul_lut(self, s: int):
        """256-entry numpy uint8 table applying ``s *`` to a packed byte."""
        import numpy as np

        lut = self._byte_luts.get(s)
        if lut is not None:
            return lut
        per = self.packed_per_byte()
        if per == 0:
            raise CodingError(f"field degree {self.m} does not pack into bytes")
        mask = self.q - 1
        out = bytearray(256)
        for v in range(256):
            acc = 0
            for t in range(per):
                sub = (v >> (t * self.m)) & mask
                acc |= self.mul(s, sub) << (t * self.m)
            out[v] = acc
        arr = np.frombuffer(bytes(out), dtype=np.uint8).copy()
        self._byte_luts[s] = arr
        return arr

    def scale_bytes(self, s: int, data: bytes) -> bytes:
        """Multiply every packed symbol in ``data`` by the scalar ``s``."""
        import numpy as np

        if s == 0:
            return bytes(len(data))
        if s == 1:
            return bytes(data)
        lut = self.byte_mul_lut(s)
        return lut[np.frombuffer(data, dtype=np.uint8)].tobytes()


@dataclass(frozen=True)
class FieldElement:
    """A single field value tied to its spec."""

    value: int
    field: GF

    def _join(self, other: "FieldElement") -> GF:
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")
        if self.field != other.field:
            raise FieldMismatchError(
                f"mixed fields {self.field!r} and {other.field!r}"
            )
        return self.field

    def __add__(self, other: "FieldElement") -> "FieldElement":
        f = self._join(other)
        return FieldElement(f.add(self.value, other.value), f)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        f = self._join(other)
        return FieldElement(f.mul(self.value, other.value), f)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        f = self._join(other)
        return FieldElement(f.div(self.value, other.value), f)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0
