"""Storage versus repair-bandwidth tradeoff for regenerating codes.

For a system that stores a size ``size`` file on ``n`` nodes so any
``k`` recover it, with failed nodes rebuilt from ``d`` helpers pulling
``gamma`` total symbols, the minimum per-node storage follows a
piecewise-linear curve in ``gamma``.  This module evaluates that curve
exactly with ``fractions.Fraction``; nothing here ever rounds.

The curve is flat at ``size/k`` for large ``gamma`` and bends at
``k`` breakpoints; below the last breakpoint no storage amount works
at all.  The two endpoints of interest are the minimum-storage point
(least storage, then least bandwidth) and the minimum-bandwidth point
(least bandwidth outright, where storage equals bandwidth).
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import CodingError, InfeasibleBandwidthError


class TradeoffPoint(NamedTuple):
    gamma: Fraction
    alpha: Fraction


def _check_params(n: int, k: int, d: int) -> None:
    if not (0 < k < n):
        raise CodingError(f"need 0 < k < n, got n={n} k={k}")
    if not (k <= d <= n - 1):
        raise CodingError(f"need k <= d <= n-1, got k={k} d={d} n={n}")


def breakpoint_gamma(i: int, n: int, k: int, d: int, size) -> Fraction:
    """Bandwidth value where the storage curve changes slope.

    Index 0 gives the flat-region edge (the minimum-storage bandwidth)
    and index k-1 gives the absolute minimum bandwidth.
    """
    _check_params(n, k, d)
    if not 0 <= i <= k - 1:
        raise CodingError(f"breakpoint index must be in 0..{k-1}, got {i}")
    size = Fraction(size)
    den = (2 * k - i - 1) * i + 2 * k * (d - k + 1)
    return Fraction(2 * size * d, den)


def bandwidth_weight(i: int, k: int, d: int) -> Fraction:
    """Slope coefficient of the i-th sloped curve segment."""
    if not 0 <= i <= k - 1:
        raise CodingError(f"segment index must be in 0..{k-1}, got {i}")
    return Fraction((2 * d - 2 * k + i + 1) * i, 2 * d)


def min_bandwidth(n: int, k: int, d: int, size) -> Fraction:
    """Least repair bandwidth any storage amount can achieve."""
    return breakpoint_gamma(k - 1, n, k, d, size)


def storage_threshold(n: int, k: int, d: int, gamma, size) -> Fraction:
    """Minimum per-node storage that makes (gamma, alpha) feasible.

    Raises InfeasibleBandwidthError when gamma is below the absolute
    minimum bandwidth.
    """
    _check_params(n, k, d)
    gamma = Fraction(gamma)
    size = Fraction(size)
    floor = min_bandwidth(n, k, d, size)
    if gamma < floor:
        raise InfeasibleBandwidthError(
            f"bandwidth {gamma} below minimum {floor} for (n={n},k={k},d={d})"
        )
    if gamma >= breakpoint_gamma(0, n, k, d, size):
        return size / k
    for i in range(1, k):
        lo = breakpoint_gamma(i, n, k, d, size)
        hi = breakpoint_gamma(i - 1, n, k, d, size)
        if lo <= gamma < hi:
            return (size - bandwidth_weight(i, k, d) * gamma) / (k - i)
    raise AssertionError("unreachable: gamma not covered by any segment")


def min_storage_point(n: int, k: int, d: int, size) -> TradeoffPoint:
    """Endpoint with the least storage (and the least bandwidth there)."""
    _check_params(n, k, d)
    size = Fraction(size)
    alpha = size / k
    gamma = Fraction(size * d, k * (d - k + 1))
    return TradeoffPoint(gamma, alpha)


def min_bandwidth_point(n: int, k: int, d: int, size) -> TradeoffPoint:
    """Endpoint with the least bandwidth; storage equals bandwidth."""
    _check_params(n, k, d)
    size = Fraction(size)
    both = Fraction(2 * size * d, 2 * k * d - k * k + k)
    return TradeoffPoint(both, both)


def tradeoff_curve(n: int, k: int, d: int, size, points: int = 0) -> list[TradeoffPoint]:
    """Sampled curve between the two endpoints.

    Always contains every breakpoint; ``points`` extra samples are
    spread evenly across the bandwidth range.  Sorted by ascending
    bandwidth, duplicates removed.
    """
    _check_params(n, k, d)
    size = Fraction(size)
    gammas = {breakpoint_gamma(i, n, k, d, size) for i in range(k)}
    lo = min_bandwidth(n, k, d, size)
    hi = breakpoint_gamma(0, n, k, d, size)
    if points > 1 and hi > lo:
        step = (hi - lo) / (points - 1)
        for t in range(points):
            gammas.add(lo + step * t)
    elif points > 0:
        gammas.add(lo)
    out = [TradeoffPoint(g, storage_threshold(n, k, d, g, size))
           for g in sorted(gammas)]
    return out


def curve_csv(curve: Sequence[TradeoffPoint]) -> str:
    """Render a curve as ``gamma,alpha`` CSV with 12-significant-digit floats."""
    lines = ["gamma,alpha"]
    for p in curve:
        lines.append(f"{float(p.gamma):.12g},{float(p.alpha):.12g}")
    return "\n".join(lines) + "\n"
