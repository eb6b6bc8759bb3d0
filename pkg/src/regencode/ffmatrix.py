"""Dense vectors and matrices over a binary extension field.

Everything here is exact.  Entries are stored as plain ints and every
object carries the field spec it lives in; mixing specs raises
``FieldMismatchError``.  Elimination uses the first nonzero entry in
the current column as pivot and scans columns left to right, so the
echelon form, the canonical solution of an underdetermined system
(free variables pinned to zero) and the null space basis are all
deterministic.

Shapes in this package stay small (nothing above 18x18), so the plain
row-operation loops below are the whole story; there is no blocking or
numpy acceleration to reason about.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import (
    CodingError,
    FieldMismatchError,
    NoSolutionError,
    SingularMatrixError,
)
from .galois import GF


def _same_field(a: GF, b: GF) -> GF:
    if a != b:
        raise FieldMismatchError(f"mixed fields {a!r} and {b!r}")
    return a


class FieldVector:
    """An immutable vector of field symbols."""

    __slots__ = ("field", "values")

    def __init__(self, field: GF, values: Iterable[int]):
        vals = tuple(field.check(v) for v in values)
        self.field = field
        self.values = vals

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> int:
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldVector)
            and self.field == other.field
            and self.values == other.values
        )

    def __hash__(self) -> int:
        return hash((self.field, self.values))

    def __repr__(self) -> str:
        return f"FieldVector({list(self.values)})"

    def __add__(self, other: "FieldVector") -> "FieldVector":
        _same_field(self.field, other.field)
        if len(self) != len(other):
            raise CodingError("length mismatch")
        return FieldVector(self.field, (a ^ b for a, b in zip(self, other)))

    def scale(self, s: int) -> "FieldVector":
        mul = self.field.mul
        return FieldVector(self.field, (mul(s, v) for v in self.values))

    def dot(self, other: "FieldVector") -> int:
        _same_field(self.field, other.field)
        if len(self) != len(other):
            raise CodingError("length mismatch")
        mul = self.field.mul
        acc = 0
        for a, b in zip(self.values, other.values):
            acc ^= mul(a, b)
        return acc

    def is_zero(self) -> bool:
        return not any(self.values)


class FieldMatrix:
    """A rectangular matrix of field symbols with exact elimination."""

    __slots__ = ("field", "rows", "nrows", "ncols")

    def __init__(self, field: GF, rows: Sequence[Sequence[int]]):
        data = [list(r) for r in rows]
        if not data:
            raise CodingError("matrix needs at least one row")
        width = len(data[0])
        if width == 0:
            raise CodingError("matrix needs at least one column")
        for r in data:
            if len(r) != width:
                raise CodingError("ragged rows")
            for v in r:
                field.check(v)
        self.field = field
        self.rows = data
        self.nrows = len(data)
        self.ncols = width

    # -- constructors ------------------------------------------------

    @classmethod
    def identity(cls, field: GF, n: int) -> "FieldMatrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, field: GF, nrows: int, ncols: int) -> "FieldMatrix":
        return cls(field, [[0] * ncols for _ in range(nrows)])

    @classmethod
    def from_rows(cls, field: GF, rows: Sequence[Sequence[int]]) -> "FieldMatrix":
        return cls(field, rows)

    @classmethod
    def stack(cls, matrices: Sequence["FieldMatrix"]) -> "FieldMatrix":
        field = matrices[0].field
        rows: list[list[int]] = []
        for m in matrices:
            _same_field(field, m.field)
            rows.extend(list(r) for r in m.rows)
        return cls(field, rows)

    # -- basics ------------------------------------------------------

    def copy_rows(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FieldMatrix)
            and self.field == other.field
            and self.rows == other.rows
        )

    def __repr__(self) -> str:
        return f"FieldMatrix({self.rows})"

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(
            self.field,
            [[self.rows[r][c] for r in range(self.nrows)] for c in range(self.ncols)],
        )

    def row(self, i: int) -> FieldVector:
        return FieldVector(self.field, self.rows[i])

    def column(self, j: int) -> FieldVector:
        return FieldVector(self.field, (self.rows[i][j] for i in range(self.nrows)))

    def submatrix(self, row_ids: Sequence[int], col_ids: Sequence[int]) -> "FieldMatrix":
        return FieldMatrix(
            self.field, [[self.rows[r][c] for c in col_ids] for r in row_ids]
        )

    # -- products ----------------------------------------------------

    def matmul(self, other: "FieldMatrix") -> "FieldMatrix":
        _same_field(self.field, other.field)
        if self.ncols != other.nrows:
            raise CodingError("inner dimension mismatch")
        mul = self.field.mul
        out = []
        bt = other.transpose().rows
        for arow in self.rows:
            orow = []
            for bcol in bt:
                acc = 0
                for a, b in zip(arow, bcol):
                    if a and b:
                        acc ^= mul(a, b)
                orow.append(acc)
            out.append(orow)
        return FieldMatrix(self.field, out)

    def matvec(self, vec: FieldVector) -> FieldVector:
        _same_field(self.field, vec.field)
        if self.ncols != len(vec):
            raise CodingError("dimension mismatch")
        mul = self.field.mul
        out = []
        for row in self.rows:
            acc = 0
            for a, b in zip(row, vec.values):
                if a and b:
                    acc ^= mul(a, b)
            out.append(acc)
        return FieldVector(self.field, out)

    def vecmat(self, vec: FieldVector) -> FieldVector:
        return self.transpose().matvec(vec)

    def scale(self, s: int) -> "FieldMatrix":
        mul = self.field.mul
        return FieldMatrix(self.field, [[mul(s, v) for v in r] for r in self.rows])

    def add(self, other: "FieldMatrix") -> "FieldMatrix":
        _same_field(self.field, other.field)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise CodingError("shape mismatch")
        return FieldMatrix(
            self.field,
            [[a ^ b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)],
        )

    # -- elimination -------------------------------------------------

    def _echelon(self, work: list[list[int]]) -> list[tuple[int, int]]:
        """Reduce ``work`` in place to reduced row echelon form.

        Returns the (row, column) pivot positions.  Pivot choice is the
        first row with a nonzero entry in the leftmost unfinished
        column.
        """
        field = self.field
        mul = field.mul
        inv = field.inv
        nrows = len(work)
        ncols = len(work[0])
        pivots: list[tuple[int, int]] = []
        prow = 0
        for col in range(ncols):
            sel = -1
            for r in range(prow, nrows):
                if work[r][col]:
                    sel = r
                    break
            if sel < 0:
                continue
            work[prow], work[sel] = work[sel], work[prow]
            piv = work[prow]
            pv = piv[col]
            if pv != 1:
                s = inv(pv)
                work[prow] = piv = [mul(s, v) for v in piv]
            for r in range(nrows):
                if r != prow and work[r][col]:
                    f = work[r][col]
                    row = work[r]
                    work[r] = [a ^ mul(f, b) for a, b in zip(row, piv)]
            pivots.append((prow, col))
            prow += 1
            if prow == nrows:
                break
        return pivots

    def rank(self) -> int:
        work = self.copy_rows()
        return len(self._echelon(work))

    def invert(self) -> "FieldMatrix":
        if self.nrows != self.ncols:
            raise SingularMatrixError("only square matrices invert")
        n = self.nrows
        work = [list(r) + [1 if i == j else 0 for j in range(n)]
                for i, r in enumerate(self.rows)]
        pivots = self._echelon(work)
        # a pivot in the augmented half means the left block is rank
        # deficient even though the combined rows are independent
        left = [p for p in pivots if p[1] < n]
        if len(left) != n:
            raise SingularMatrixError(f"rank {len(left)} < {n}")
        return FieldMatrix(self.field, [r[n:] for r in work])

    def solve(self, rhs: FieldVector | Sequence[int]) -> FieldVector:
        """Solve ``self @ x = rhs``.

        Underdetermined systems get the canonical solution with every
        free variable set to zero.  Inconsistent systems raise
        ``NoSolutionError``.
        """
        if isinstance(rhs, FieldVector):
            _same_field(self.field, rhs.field)
            rhs_vals = rhs.values
        else:
            rhs_vals = tuple(self.field.check(v) for v in rhs)
        if len(rhs_vals) != self.nrows:
            raise CodingError("rhs length mismatch")
        work = [list(r) + [b] for r, b in zip(self.rows, rhs_vals)]
        pivots = self._echelon(work)
        ncols = self.ncols
        for row_id in range(len(pivots), self.nrows):
            if work[row_id][ncols]:
                raise NoSolutionError("inconsistent system")
        # A pivot in the rhs column also flags inconsistency.
        if any(c == ncols for _, c in pivots):
            raise NoSolutionError("inconsistent system")
        x = [0] * ncols
        for r, c in pivots:
            x[c] = work[r][ncols]
        return FieldVector(self.field, x)

    def null_space(self) -> list[FieldVector]:
        """Basis of the right null space, one vector per free column.

        Each basis vector sets its free variable to one and the other
        free variables to zero, in ascending column order.
        """
        work = self.copy_rows()
        pivots = self._echelon(work)
        pivot_cols = {c: r for r, c in pivots}
        free_cols = [c for c in range(self.ncols) if c not in pivot_cols]
        basis = []
        for fc in free_cols:
            vec = [0] * self.ncols
            vec[fc] = 1
            for c, r in pivot_cols.items():
                vec[c] = work[r][fc]
            basis.append(FieldVector(self.field, vec))
        return basis


def rows_rank(field: GF, rows: Iterable[Sequence[int]]) -> int:
    """Rank of a collection of coefficient rows without building a matrix."""
    data = [list(r) for r in rows]
    if not data:
        return 0
    return FieldMatrix(field, data).rank()


def span_contains(field: GF, basis_rows: Sequence[Sequence[int]], vec: Sequence[int]) -> bool:
    """True iff ``vec`` lies in the row span of ``basis_rows``."""
    base = [list(r) for r in basis_rows]
    if not base:
        return not any(vec)
    r0 = FieldMatrix(field, base).rank()
    r1 = FieldMatrix(field, base + [list(vec)]).rank()
    return r0 == r1
