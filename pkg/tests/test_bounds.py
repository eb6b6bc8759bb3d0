"""The storage / repair-bandwidth tradeoff arithmetic.

Everything here is exact rational math, so the tests pin closed-form
values computed independently and structural facts (monotonicity,
endpoint consistency) on sweeps of small parameter sets.
"""

from fractions import Fraction

import pytest

from regencode.bounds import (
    InfeasibleBandwidthError,
    bandwidth_weight,
    breakpoint_gamma,
    curve_csv,
    min_bandwidth,
    min_bandwidth_point,
    min_storage_point,
    storage_threshold,
    tradeoff_curve,
)


def test_reference_endpoints_ten_five_nine():
    msr = min_storage_point(10, 5, 9, 1)
    assert (msr.gamma, msr.alpha) == (Fraction(9, 25), Fraction(1, 5))
    mbr = min_bandwidth_point(10, 5, 9, 1)
    assert (mbr.gamma, mbr.alpha) == (Fraction(9, 35), Fraction(9, 35))


def test_threshold_at_unit_bandwidth_matches_plain_striping():
    # at gamma = 1 a unit-size file needs exactly 1/k per node
    assert storage_threshold(10, 5, 9, 1, 1) == Fraction(1, 5)


def test_min_bandwidth_four_two_three_size_four():
    assert min_bandwidth(4, 2, 3, 4) == Fraction(12, 5)
    curve = tradeoff_curve(4, 2, 3, 4)
    # k = 2 gives two breakpoints; both must be on the curve
    gammas = {pt.gamma for pt in curve}
    assert Fraction(12, 5) in gammas
    assert len([pt for pt in curve]) >= 2


def test_breakpoints_interpolate_threshold():
    """At breakpoint i the threshold equals the simple pooled formula."""
    for (n, k, d) in [(10, 5, 9), (6, 4, 5), (5, 3, 4), (7, 3, 3)]:
        size = Fraction(1)
        # index 0 is the min-storage end; pooled formula covers 1..k-1
        assert breakpoint_gamma(0, n, k, d, size) == min_storage_point(
            n, k, d, size
        ).gamma
        for i in range(1, k):
            g = breakpoint_gamma(i, n, k, d, size)
            alpha = storage_threshold(n, k, d, g, size)
            w = bandwidth_weight(i, k, d)
            assert alpha == (size - g * w) / (k - i)


def test_threshold_monotone_in_gamma():
    size = Fraction(1)
    n, k, d = 6, 4, 5
    lo = min_bandwidth(n, k, d, size)
    samples = [lo + Fraction(t, 40) for t in range(0, 60)]
    values = [storage_threshold(n, k, d, g, size) for g in samples]
    for a, b in zip(values, values[1:]):
        assert a >= b


def test_threshold_flat_beyond_msr_gamma():
    n, k, d = 10, 5, 9
    msr = min_storage_point(n, k, d, 1)
    for extra in (Fraction(1, 10), 1, 5):
        assert storage_threshold(n, k, d, msr.gamma + extra, 1) == msr.alpha


def test_bandwidth_below_minimum_is_rejected():
    n, k, d = 10, 5, 9
    g = min_bandwidth(n, k, d, 1)
    with pytest.raises(InfeasibleBandwidthError):
        storage_threshold(n, k, d, g - Fraction(1, 1000), 1)
    # the minimum itself is fine and hits alpha = gamma
    assert storage_threshold(n, k, d, g, 1) == g


def test_curve_endpoints_and_ordering():
    for (n, k, d) in [(10, 5, 9), (5, 3, 4), (8, 4, 6)]:
        curve = tradeoff_curve(n, k, d, 1, points=12)
        msr = min_storage_point(n, k, d, 1)
        mbr = min_bandwidth_point(n, k, d, 1)
        assert curve[0] == mbr
        assert curve[-1] == msr
        gammas = [pt.gamma for pt in curve]
        assert gammas == sorted(gammas)
        alphas = [pt.alpha for pt in curve]
        assert alphas == sorted(alphas, reverse=True)


def test_mbr_point_stores_exactly_its_bandwidth():
    for n in range(3, 9):
        for k in range(2, n):
            d = n - 1
            pt = min_bandwidth_point(n, k, d, 1)
            assert pt.alpha == pt.gamma


def test_degenerate_single_node_collection():
    # k = 1: one node holds everything, bandwidth d*beta arbitrary small
    pt = min_storage_point(4, 1, 3, 1)
    assert pt.alpha == 1


def test_curve_csv_layout():
    curve = tradeoff_curve(10, 5, 9, 1)
    text = curve_csv(curve)
    lines = text.strip().split("\n")
    assert lines[0] == "gamma,alpha"
    assert len(lines) == len(curve) + 1
    first = lines[1].split(",")
    assert float(first[0]) == pytest.approx(9 / 35)
    assert float(first[1]) == pytest.approx(9 / 35)


def test_invalid_shapes_rejected():
    with pytest.raises(Exception):
        storage_threshold(4, 5, 3, 1, 1)
    with pytest.raises(Exception):
        min_storage_point(4, 2, 1, 1)
