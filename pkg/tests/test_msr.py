"""Minimum-storage construction at rate one half."""

import json
import os
import random
from itertools import combinations

import pytest

from regencode.errors import (
    FieldTooSmallError,
    InvalidRepairError,
    UnsupportedCodeError,
)
from regencode.ffmatrix import FieldMatrix, rows_rank
from regencode.galois import GF
from regencode.msr import (
    MsrCode,
    _dot,
    msr_construct,
    msr_decode,
    msr_encode,
    msr_repair,
    msr_repair_parity,
    msr_repair_systematic,
)

GF4 = GF(2)
FIXDIR = os.path.join(os.path.dirname(__file__), "fixtures")


def _fixture(name):
    with open(os.path.join(FIXDIR, name)) as fh:
        return json.load(fh)


def _tt(rows):
    return tuple(tuple(r) for r in rows)


@pytest.fixture(scope="module")
def k2():
    return msr_construct(2, GF4)


@pytest.fixture(scope="module")
def k3():
    return msr_construct(3, GF4)


def test_k2_matches_fixture(k2):
    fix = _fixture("msr_k2_gf4.json")
    assert k2.k == 2 and k2.field.m == fix["field_bits"]
    assert k2.left_dirs == _tt(fix["left_dirs"])
    assert k2.right_dirs == _tt(fix["right_dirs"])
    assert k2.coupling == fix["coupling"]
    assert k2.all_node_rows() == tuple(_tt(n) for n in fix["node_rows"])
    plan = k2.repair_plan(0)
    assert list(plan.downloads) == [
        (node, tuple(w)) for node, w in fix["repair0_downloads"]
    ]
    assert plan.rebuild == _tt(fix["repair0_rebuild"])


def test_k3_matches_fixture(k3):
    fix = _fixture("msr_k3_gf4.json")
    assert k3.left_dirs == _tt(fix["left_dirs"])
    assert k3.right_dirs == _tt(fix["right_dirs"])
    assert k3.coupling == fix["coupling"]
    assert k3.all_node_rows() == tuple(_tt(n) for n in fix["node_rows"])
    plan = k3.repair_plan(0)
    assert list(plan.downloads) == [
        (node, tuple(w)) for node, w in fix["repair0_downloads"]
    ]
    assert plan.rebuild == _tt(fix["repair0_rebuild"])


def test_construct_is_deterministic():
    a = msr_construct(3, GF4)
    b = msr_construct(3, GF4)
    assert a == b


def test_goldens_verify(k2, k3):
    assert k2.verify()
    assert k3.verify()


def test_verify_rejects_bad_coupling(k2):
    broken = MsrCode(2, GF4, k2.left_dirs, k2.right_dirs, 1)
    assert not broken.verify()
    broken = MsrCode(2, GF4, k2.left_dirs, k2.right_dirs, 0)
    assert not broken.verify()


def test_verify_rejects_degenerate_directors(k2):
    # a zero right-director zeroes a diagonal coefficient
    broken = MsrCode(2, GF4, k2.left_dirs, ((0, 0), (1, 2)), 2)
    assert not broken.verify()


def test_every_k_subset_decodes(k2, k3):
    rng = random.Random(31)
    for code in (k2, k3):
        m = code.message_symbols
        for _ in range(10):
            data = [rng.randrange(4) for _ in range(m)]
            shares = msr_encode(code, data)
            for subset in combinations(range(code.n), code.k):
                got = msr_decode(code, [shares[v] for v in subset])
                assert got == data


def test_systematic_shares_are_raw_blocks(k3):
    data = [[1, 2, 3], [0, 1, 2], [3, 3, 1]]
    shares = msr_encode(k3, data)
    for j in range(3):
        assert list(shares[j].blocks) == data[j]


def test_encode_accepts_flat_or_nested(k2):
    nested = msr_encode(k2, [[1, 2], [3, 0]])
    flat = msr_encode(k2, [1, 2, 3, 0])
    assert nested == flat


def test_all_repairs_bit_exact(k2, k3):
    rng = random.Random(7)
    for code in (k2, k3):
        for trial in range(10):
            data = [rng.randrange(4) for _ in range(code.message_symbols)]
            shares = msr_encode(code, data)
            for failed in range(code.n):
                survivors = [s for s in shares if s.node_id != failed]
                share, plan, trace = msr_repair(code, failed, survivors)
                assert share.blocks == shares[failed].blocks
                assert trace.total_symbols == code.d == 2 * code.k - 1
                assert trace.per_helper == (1,) * code.d
                assert len(plan.downloads) == code.d


def test_dispatcher_matches_specialists(k3):
    data = list(range(9))
    shares = msr_encode(k3, data)
    surv = lambda f: [s for s in shares if s.node_id != f]
    assert msr_repair(k3, 1, surv(1)) == msr_repair_systematic(k3, 1, surv(1))
    assert msr_repair(k3, 4, surv(4)) == msr_repair_parity(k3, 4, surv(4))
    with pytest.raises(InvalidRepairError):
        msr_repair_systematic(k3, 4, surv(4))
    with pytest.raises(InvalidRepairError):
        msr_repair_parity(k3, 1, surv(1))
    with pytest.raises(InvalidRepairError):
        msr_repair(k3, 6, shares)
    with pytest.raises(InvalidRepairError):
        msr_repair(k3, 0, surv(0)[:3])


def test_k3_projection_is_all_ones(k3):
    assert k3.systematic_projection(0) == (1, 1, 1)


def test_projections_kill_other_blocks(k3):
    f = k3.field
    for j in range(3):
        p = k3.systematic_projection(j)
        for x in range(3):
            dot = _dot(f, k3.right_dirs[x], p)
            assert (dot == 0) == (x != j)


def test_interference_from_each_unwanted_block_has_rank_one(k3):
    # the download from parity i depends on unwanted block x through
    # the row c[x][i] * p only, so stacking those rows over i gives a
    # rank-1 matrix spanned by the projection itself
    f, k = k3.field, k3.k
    for j in range(k):
        p = k3.systematic_projection(j)
        for x in range(k):
            if x == j:
                continue
            dep_rows = []
            for i in range(k):
                rows = k3.node_rows(k + i)
                dep = [
                    _dot(f, p, [rows[t][x * k + s] for t in range(k)])
                    for s in range(k)
                ]
                dep_rows.append(dep)
            assert rows_rank(f, dep_rows) == 1
            assert rows_rank(f, dep_rows + [list(p)]) == 1


def test_parity_repair_solves_five_unknowns(k3):
    plan = k3.repair_plan(4)
    assert len(plan.downloads) == 5
    assert len(plan.rebuild) == 3
    assert all(len(r) == 5 for r in plan.rebuild)
    # every survivor ships the same single projected symbol
    p = k3.parity_projection(1)
    assert all(w == p for _, w in plan.downloads)


def test_dual_directors_reproduce_brute_force_inverse(k3):
    # forward mixing map as one k^2 x k^2 matrix of E^T blocks; its
    # true inverse must equal the same construction evaluated on the
    # closed-form dual directors
    f, k = k3.field, k3.k

    def big(left, right, diag):
        rows = []
        for i in range(k):
            for s in range(k):
                row = []
                for j in range(k):
                    for t in range(k):
                        v = f.mul(right[j][s], left[i][t])
                        if s == t:
                            v = f.add(v, diag[j][i])
                        row.append(v)
                rows.append(row)
        return FieldMatrix(f, rows)

    forward = big(k3.left_dirs, k3.right_dirs, k3.diag_coeffs)
    dual = big(
        k3.dual_left_dirs,
        k3.dual_right_dirs,
        tuple(
            tuple(k3.dual_diag_coeffs[j][i] for i in range(k))
            for j in range(k)
        ),
    )
    assert forward.invert().rows == dual.rows


def test_construct_beyond_goldens():
    # fields with no pinned instance still come out verified
    for k, field in ((2, GF(3)), (3, GF(3))):
        code = msr_construct(k, field)
        assert code.verify()
        assert code.field is field


def test_parameter_validation():
    with pytest.raises(FieldTooSmallError):
        msr_construct(2, GF(1))
    with pytest.raises(UnsupportedCodeError):
        msr_construct(1, GF4)


def test_decode_validates_subset(k2):
    shares = msr_encode(k2, [1, 2, 3, 0])
    with pytest.raises(ValueError):
        msr_decode(k2, [shares[0], shares[0]])
    with pytest.raises(ValueError):
        k2.encode([1, 2, 3])
