"""Exact linear algebra over the binary extension fields."""

import random

import pytest

from regencode.errors import (
    NoSolutionError,
    SingularMatrixError,
)
from regencode.ffmatrix import (
    FieldMatrix,
    FieldVector,
    rows_rank,
    span_contains,
)
from regencode.galois import GF


def random_matrix(f, rows, cols, rng):
    return FieldMatrix(
        f, [[rng.randrange(f.q) for _ in range(cols)] for _ in range(rows)]
    )


def test_identity_behaves():
    f = GF(4)
    eye = FieldMatrix.identity(f, 5)
    assert eye.rank() == 5
    v = FieldVector(f, [3, 1, 4, 15, 9])
    assert list(eye.matvec(v)) == [3, 1, 4, 15, 9]


@pytest.mark.parametrize("m", [1, 2, 8])
def test_inverse_roundtrip_random(m):
    """invert() really inverts: A * A^-1 = I on random nonsingular A."""
    f = GF(m)
    rng = random.Random(31 + m)
    done = 0
    while done < 15:
        a = random_matrix(f, 6, 6, rng)
        if a.rank() < 6:
            continue
        inv = a.invert()
        assert a.matmul(inv).rows == FieldMatrix.identity(f, 6).rows
        done += 1


def test_singular_matrix_refuses_inversion():
    f = GF(8)
    a = FieldMatrix(f, [[1, 2], [1, 2]])
    with pytest.raises(SingularMatrixError):
        a.invert()


def test_solve_agrees_with_forward_multiply():
    f = GF(8)
    rng = random.Random(9)
    for _ in range(25):
        a = random_matrix(f, 5, 5, rng)
        if a.rank() < 5:
            continue
        x = FieldVector(f, [rng.randrange(f.q) for _ in range(5)])
        b = a.matvec(x)
        assert list(a.solve(list(b))) == list(x)


def test_solve_inconsistent_system_raises():
    f = GF(2)
    a = FieldMatrix(f, [[1, 0], [1, 0]])
    with pytest.raises(NoSolutionError):
        a.solve([1, 2])


def test_solve_underdetermined_is_consistent():
    # wide system: a reported solution must still satisfy it
    f = GF(4)
    rng = random.Random(77)
    a = random_matrix(f, 3, 6, rng)
    x = FieldVector(f, [rng.randrange(f.q) for _ in range(6)])
    b = a.matvec(x)
    got = a.solve(list(b))
    assert list(a.matvec(got)) == list(b)


def test_rank_of_product_never_grows():
    f = GF(4)
    rng = random.Random(123)
    for _ in range(20):
        a = random_matrix(f, 4, 5, rng)
        b = random_matrix(f, 5, 4, rng)
        assert a.matmul(b).rank() <= min(a.rank(), b.rank())


def test_null_space_vectors_annihilate():
    f = GF(8)
    rng = random.Random(5)
    for _ in range(20):
        a = random_matrix(f, 3, 7, rng)
        basis = a.null_space()
        assert len(basis) == 7 - a.rank()
        for vec in basis:
            assert any(v != 0 for v in vec)
            assert all(v == 0 for v in a.matvec(vec))


def test_transpose_and_matmul_shapes():
    f = GF(2)
    a = FieldMatrix(f, [[1, 2, 3], [0, 1, 2]])
    at = a.transpose()
    assert at.nrows == 3 and at.ncols == 2
    assert a.matmul(at).nrows == 2


def test_rows_rank_and_span_helpers():
    f = GF(2)
    basis = [(1, 0, 1), (0, 1, 1)]
    assert rows_rank(f, basis) == 2
    assert span_contains(f, basis, (1, 1, 0))
    assert not span_contains(f, basis, (1, 1, 1))


def test_vecmat_matches_transpose_matvec():
    f = GF(8)
    rng = random.Random(2)
    a = random_matrix(f, 4, 6, rng)
    v = FieldVector(f, [rng.randrange(f.q) for _ in range(4)])
    left = a.vecmat(v)
    right = a.transpose().matvec(v)
    assert list(left) == list(right)


def test_vector_dot_is_symmetric():
    f = GF(4)
    rng = random.Random(11)
    for _ in range(30):
        u = FieldVector(f, [rng.randrange(f.q) for _ in range(6)])
        v = FieldVector(f, [rng.randrange(f.q) for _ in range(6)])
        assert u.dot(v) == v.dot(u)
