"""Acceptance gate: the eight release criteria, one test each.

Run with ``pytest tests/test_acceptance.py -v`` for a pass/fail line
per criterion (add ``-s`` to see the summary prints).  Everything is
seeded; the whole file finishes in a few minutes on a desktop.
"""

import io
import random
from contextlib import redirect_stdout
from fractions import Fraction
from itertools import combinations

import numpy as np

from regencode.bounds import (
    breakpoint_gamma,
    min_bandwidth_point,
    min_storage_point,
    storage_threshold,
)
from regencode.cli import main as cli_main
from regencode.codec import build_codec
from regencode.errors import InfeasibleBandwidthError
from regencode.ffmatrix import rows_rank
from regencode.filecodec import encode_file, load_store
from regencode.flowgraph import FlowGraph, RepairStage, feasible
from regencode.galois import GF
from regencode.hybrid import hybrid_decode, hybrid_encode, hybrid_init, hybrid_repair
from regencode.mbr import mbr_construct, mbr_decode, mbr_encode, mbr_repair
from regencode.mdscore import (
    CodeSpec,
    evenodd42_decode,
    evenodd42_encode,
    evenodd42_repair,
    evenodd_repair_plan,
    xor_bytes,
)
from regencode.msr import _dot, msr_construct, msr_decode, msr_encode, msr_repair
from regencode.rlnc import init_random
from regencode.rlnc import repair as rlnc_repair


def _ok(num: int, text: str) -> None:
    print(f"criterion {num}: PASS - {text}")


def test_criterion_1_tradeoff_endpoints():
    msr = min_storage_point(10, 5, 9, 1)
    mbr = min_bandwidth_point(10, 5, 9, 1)
    assert (msr.gamma, msr.alpha) == (Fraction(9, 25), Fraction(1, 5))
    assert (mbr.gamma, mbr.alpha) == (Fraction(9, 35), Fraction(9, 35))
    # the traditional code's repair cost gamma=1 buys no storage
    # saving beyond the minimum-storage level 1/5
    assert storage_threshold(10, 5, 9, 1, 1) == Fraction(1, 5)
    buf = io.StringIO()
    with redirect_stdout(buf):
        assert cli_main(["tradeoff", "--n", "10", "--k", "5", "--d", "9"]) == 0
    out = buf.getvalue()
    assert "min-storage point: gamma=9/25 alpha=1/5" in out
    assert "min-bandwidth point: gamma=9/35 alpha=9/35" in out
    _ok(1, "(10,5,9) endpoints (9/25,1/5) and (9/35,9/35), "
           "alpha*(gamma=1)=1/5, exact rationals")


def test_criterion_2_flow_oracle_agreement():
    delta = Fraction(1, 1000)
    checks = 0
    for n in range(2, 7):
        for k in range(1, n):
            for d in range(k, n):
                gammas = set()
                for i in range(k):
                    b = breakpoint_gamma(i, n, k, d, 1)
                    gammas.update((b - delta, b, b + delta))
                for gamma in sorted(gammas):
                    beta = Fraction(gamma, d)
                    try:
                        alpha_star = storage_threshold(n, k, d, gamma, 1)
                    except InfeasibleBandwidthError:
                        # below the bandwidth floor no storage helps
                        v = feasible(n, k, d, Fraction(1), beta, 1)
                        assert not v.ok, (n, k, d, gamma)
                        checks += 1
                        continue
                    for alpha, want in (
                        (alpha_star, True),
                        (alpha_star - delta, False),
                    ):
                        if alpha <= 0:
                            continue
                        v = feasible(n, k, d, alpha, beta, 1)
                        assert v.ok == want, (n, k, d, gamma, alpha, want)
                        checks += 1
    # the pinned single-repair instance: collector on one original
    # node and the newcomer sees a cut of alpha + 2 beta
    alpha, beta = 2, 1
    g = FlowGraph(4, 2, 3, alpha, beta, [RepairStage(3, (0, 1, 2))])
    assert g.min_cut({4, 0}) == alpha + 2 * beta == 4
    _ok(2, f"flow feasibility matched alpha >= alpha* in {checks}/{checks} "
           "samples over all shapes n <= 6; pinned cut alpha+2beta")


def test_criterion_3_evenodd_repairs():
    rng = random.Random(1234)
    width = 6
    plan0 = evenodd_repair_plan(0)
    plan3 = evenodd_repair_plan(3)
    assert plan0.symbols_moved == plan3.symbols_moved == 3
    for _ in range(100):
        a1, a2, b1, b2 = (
            bytes(rng.randrange(256) for _ in range(width)) for _ in range(4)
        )
        shares = evenodd42_encode([a1, a2, b1, b2])

        def shipped(plan):
            out = []
            for node, weights in plan.downloads:
                acc = bytes(width)
                for w, blk in zip(weights, shares[node].blocks):
                    if w:
                        acc = xor_bytes(acc, blk)
                out.append(acc)
            return out

        sent0 = shipped(plan0)
        assert sent0 == [
            b2, xor_bytes(a2, b2), xor_bytes(a1, xor_bytes(a2, b2)),
        ]
        assert set(sent0) == {b2, xor_bytes(a2, b2),
                              xor_bytes(a1, xor_bytes(a2, b2))}
        sent3 = shipped(plan3)
        assert xor_bytes(b1, b2) in sent3
        for failed, plan in ((0, plan0), (3, plan3)):
            survivors = [s for s in shares if s.node_id != failed]
            rebuilt, trace = evenodd42_repair(failed, survivors)
            assert rebuilt.blocks == shares[failed].blocks
            assert trace.total_symbols == 3
            assert len(shipped(plan)) == 3
        for pair in combinations(range(4), 2):
            got = evenodd42_decode([shares[i] for i in pair])
            assert got == [a1, a2, b1, b2]
    _ok(3, "node-0 downloads {B2, A2+B2, A1+A2+B2}, node-3 ships B1+B2, "
           "3 blocks each, bit-exact; 6 pair decodes x 100 payloads")


def test_criterion_4_exact_mbr():
    lay = mbr_construct(5, 3, GF(1))
    assert lay.message_symbols == 9
    rows = lay.precode.rows
    for i in range(9):
        assert tuple(rows[i]) == tuple(1 if c == i else 0 for c in range(9))
    assert tuple(rows[9]) == (1,) * 9
    rng = random.Random(77)
    for _ in range(20):
        data = [rng.randrange(2) for _ in range(9)]
        shares = mbr_encode(lay, data)
        for failed in range(5):
            survivors = [s for s in shares if s.node_id != failed]
            rebuilt, trace = mbr_repair(lay, failed, survivors)
            assert trace.total_symbols == 4
            assert rebuilt.blocks == shares[failed].blocks
        for triple in combinations(range(5), 3):
            assert mbr_decode(lay, [shares[i] for i in triple]) == data
    pairs = 0
    for n in range(3, 9):
        for k in range(1, n):
            built = mbr_construct(n, k, GF(5))
            assert built.alpha == built.spec.gamma == n - 1
            pairs += 1
    _ok(4, "(5,3)/GF(2) unit-plus-parity precode, M=9, repairs move 4 "
           f"bit-exact, 10 triples decode; alpha=gamma on {pairs} shapes")


def test_criterion_5_exact_msr():
    k2 = msr_construct(2, GF(2))
    k3 = msr_construct(3, GF(2))
    assert k3.right_dirs == ((2, 2, 2), (2, 3, 1), (2, 1, 3))
    rng = random.Random(55)
    for code in (k2, k3):
        moved = 2 * code.k - 1
        for _ in range(5):
            data = [rng.randrange(4) for _ in range(code.message_symbols)]
            shares = msr_encode(code, data)
            for subset in combinations(range(code.n), code.k):
                assert msr_decode(code, [shares[v] for v in subset]) == data
            for failed in range(code.n):
                survivors = [s for s in shares if s.node_id != failed]
                share, plan, trace = msr_repair(code, failed, survivors)
                assert share.blocks == shares[failed].blocks
                assert trace.total_symbols == moved
    # alignment facts for k=3: common projection (1,1,1) and rank-1
    # interference from every unwanted block
    f = k3.field
    assert k3.systematic_projection(0) == (1, 1, 1)
    plan = k3.repair_plan(0)
    assert all(w == (1, 1, 1) for _, w in plan.downloads)
    for j in range(3):
        p = k3.systematic_projection(j)
        for x in range(3):
            if x == j:
                continue
            dep_rows = []
            for i in range(3):
                nrows = k3.node_rows(3 + i)
                dep_rows.append([
                    _dot(f, p, [nrows[t][x * 3 + s] for t in range(3)])
                    for s in range(3)
                ])
            assert rows_rank(f, dep_rows) == 1
    # parity repair: five first-symbol downloads feed a 5-unknown solve
    pplan = k3.repair_plan(3)
    assert len(pplan.downloads) == 5
    assert all(w == (1, 0, 0) for _, w in pplan.downloads)
    assert all(len(r) == 5 for r in pplan.rebuild)
    _ok(5, "k=2 and k=3 over GF(4): C(2k,k) decodes, 2k repairs moving "
           "2k-1 symbols bit-exact, (1,1,1) projection, rank-1 "
           "interference, 5-unknown parity solve")


def test_criterion_6_hybrid_run():
    code = hybrid_init(4, 2, GF(7))
    anchors0 = code.anchors
    data = [11, 87, 123, 6]
    shares = hybrid_encode(code, data)
    rng = random.Random(66)
    for step in range(100):
        failed = rng.randrange(4)
        code, plan, trace = hybrid_repair(code, failed, seed=step)
        assert trace.total_symbols == 3
        assert code.anchors == anchors0
        assert code.mds_ok()
        shares = hybrid_encode(code, data)
    for pair in combinations(range(4), 2):
        assert hybrid_decode(code, [shares[i] for i in pair]) == data
    _ok(6, "(4,2)/GF(128): 100 repairs x 3 symbols, all 70 subsets full "
           "rank after each, anchors byte-identical, pair decodes exact")


def test_criterion_7_rlnc_gate():
    f = GF(8)
    spec = CodeSpec(5, 3, 4, 2, 1, f, "rlnc-functional")
    total = passes = contained = 0
    for trial in range(200):
        state = init_random(spec, 6, seed=trial)
        rng = random.Random(f"accept7:{trial}")
        for _ in range(20):
            failed = rng.randrange(5)
            helpers = [v for v in range(5) if v != failed][:4]
            basis = [
                r for h in helpers for r in state.coefficient_rows()[h]
            ]
            base_rank = rows_rank(f, basis)
            state, trace = rlnc_repair(
                state, failed, seed=rng.randrange(2 ** 31)
            )
            new_rows = list(state.coefficient_rows()[failed])
            if base_rank == 6 or rows_rank(
                f, basis + new_rows
            ) == base_rank:
                contained += 1
            passes += trace.audit_ok
            total += 1
    assert total == 4000
    assert contained == total
    assert passes / total >= 0.99
    _ok(7, f"200 trials x 20 repairs: audit pass rate "
           f"{passes / total:.4f} >= 0.99, span containment "
           f"{contained}/{total}")


def test_criterion_8_end_to_end_mebibyte(tmp_path):
    payload = np.random.default_rng(88).integers(
        0, 256, size=1 << 20, dtype=np.uint8
    ).tobytes()
    builds = {
        "cauchy-mds": lambda: build_codec(
            "cauchy-mds", n=5, k=3, field=GF(8), stripes=3
        ),
        "evenodd42": lambda: build_codec("evenodd42"),
        "exact-mbr": lambda: build_codec("exact-mbr", n=5, k=3, field=GF(1)),
        "exact-msr": lambda: build_codec("exact-msr", k=2, field=GF(2)),
        "hybrid": lambda: build_codec("hybrid", n=4, k=2, field=GF(8)),
        "rlnc-functional": lambda: build_codec(
            "rlnc-functional", n=5, k=3, d=4, field=GF(8), seed=5
        ),
    }
    exact_gamma = {
        "cauchy-mds": 9,
        "evenodd42": 3,
        "exact-mbr": 4,
        "exact-msr": 3,
        "hybrid": 3,
    }
    for family, make in builds.items():
        root = tmp_path / family
        store = encode_file(payload, make(), root)
        n, k = store.spec.n, store.spec.k
        for v in range(n - k):
            store.share_path(v).unlink()
        store = load_store(root)
        for v in range(n - k):
            store.repair(v, seed=v)
        assert store.decode() == payload, family
        # with everyone back, a lone failure costs exactly gamma
        store.share_path(n - 1).unlink()
        trace = store.repair(n - 1, seed=9)
        if family in exact_gamma:
            assert trace.total_symbols == exact_gamma[family] \
                == store.spec.gamma
        assert store.decode() == payload, family
    _ok(8, "1 MiB per family: destroy n-k, repair all, byte-identical "
           "decode; single-failure traffic equals analytic gamma")
