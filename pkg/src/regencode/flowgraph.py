"""Information flow graphs for repair-history feasibility checks.

A storage system's life is modeled as a DAG.  Each stored node
instance contributes an in/out vertex pair joined by an edge of
capacity alpha (its storage).  Original nodes hang off the source with
unbounded edges.  Every repair stage adds a newcomer wired from its
helpers' out-vertices with capacity-beta edges.  A data collector
contacts the out-vertices of k live nodes over unbounded edges.  The
file survives a history iff every such collector sees a min-cut of at
least the file size.

Cuts are computed exactly: rational capacities are rescaled by a
common denominator to integers and pushed through an augmenting-path
max-flow (Dinic's layering).  "Unbounded" is one more than the sum of
all finite capacities, which no real cut can use.

Feasibility of an (alpha, beta) operating point is checked empirically
against a budgeted family of histories: the canonical cascades (each
newcomer helped by every earlier newcomer, topped up with originals)
are explored exhaustively up to k failures, plus a seeded batch of
random histories.  The cascades are the binding family in every case
covered by the closed-form storage threshold, so agreement with it is
a test target, not an assumption.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Optional, Sequence

from .errors import CodingError, InvalidHistoryError

__all__ = [
    "RepairStage",
    "FlowGraph",
    "FeasibilityResult",
    "canonical_cascade",
    "random_history",
    "feasible",
]


@dataclass(frozen=True)
class RepairStage:
    """One failure and the helper set that rebuilt it."""

    failed: int
    helpers: tuple[int, ...]


def canonical_cascade(n: int, k: int, d: int, depth: int) -> list[RepairStage]:
    """Sequential failures 0..depth-1, newcomers helping each other.

    Each newcomer draws from every earlier newcomer first and fills the
    remaining helper slots with the lowest surviving originals.  This
    is the history family whose collectors produce the tightest cuts.
    """
    if not 1 <= depth <= min(k, n):
        raise CodingError(f"cascade depth must be in 1..{min(k, n)}")
    stages = []
    for s in range(depth):
        helpers = list(range(n, n + s)) + list(range(s + 1, d + 1))
        stages.append(RepairStage(s, tuple(helpers)))
    return stages


def random_history(
    n: int, d: int, depth: int, rng: random.Random
) -> list[RepairStage]:
    """A uniformly random failure history of the given depth."""
    active = list(range(n))
    stages = []
    for step in range(depth):
        failed = active[rng.randrange(len(active))]
        pool = [x for x in active if x != failed]
        helpers = tuple(sorted(rng.sample(pool, d)))
        stages.append(RepairStage(failed, helpers))
        active.remove(failed)
        active.append(n + step)
    return stages


class FlowGraph:
    """The DAG for one failure history, ready for repeated cut queries."""

    def __init__(self, n: int, k: int, d: int, alpha, beta,
                 history: Sequence[RepairStage] = ()):
        if not (0 < k < n):
            raise CodingError(f"need 0 < k < n, got n={n} k={k}")
        if not (k <= d <= n - 1):
            raise CodingError(f"need k <= d <= n-1, got k={k} d={d}")
        alpha = Fraction(alpha)
        beta = Fraction(beta)
        if alpha <= 0 or beta <= 0:
            raise CodingError("alpha and beta must be positive")
        self.n, self.k, self.d = n, k, d
        self.alpha, self.beta = alpha, beta
        self.history = tuple(history)

        active = set(range(n))
        instances = n
        for step, stage in enumerate(self.history):
            if stage.failed not in active:
                raise InvalidHistoryError(
                    f"stage {step}: node {stage.failed} is not alive"
                )
            helpers = tuple(stage.helpers)
            if len(set(helpers)) != len(helpers):
                raise InvalidHistoryError(f"stage {step}: duplicate helpers")
            if len(helpers) != d:
                raise InvalidHistoryError(
                    f"stage {step}: expected {d} helpers, got {len(helpers)}"
                )
            for h in helpers:
                if h not in active or h == stage.failed:
                    raise InvalidHistoryError(
                        f"stage {step}: helper {h} is not a live other node"
                    )
            active.discard(stage.failed)
            active.add(n + step)
            instances += 1
        self.active = frozenset(active)
        self.instances = instances

        self._scale = lcm(alpha.denominator, beta.denominator)
        self._alpha_int = int(alpha * self._scale)
        self._beta_int = int(beta * self._scale)
        self._build()

    # Vertex layout: 0 = source, then in/out pairs per instance, last = sink.
    def _vin(self, node: int) -> int:
        return 1 + 2 * node

    def _vout(self, node: int) -> int:
        return 2 + 2 * node

    def _build(self) -> None:
        n = self.n
        self.nvert = 2 + 2 * self.instances
        self.sink = self.nvert - 1
        eto: list[int] = []
        ecap: list[int] = []
        adj: list[list[int]] = [[] for _ in range(self.nvert)]

        def add_edge(u: int, v: int, cap: int) -> int:
            idx = len(eto)
            eto.append(v)
            ecap.append(cap)
            adj[u].append(idx)
            eto.append(u)
            ecap.append(0)
            adj[v].append(idx + 1)
            return idx

        finite_total = self._alpha_int * self.instances
        finite_total += self._beta_int * self.d * len(self.history)
        self.inf = finite_total + 1

        for node in range(self.instances):
            add_edge(self._vin(node), self._vout(node), self._alpha_int)
        for orig in range(n):
            add_edge(0, self._vin(orig), self.inf)
        for step, stage in enumerate(self.history):
            newcomer = n + step
            for h in stage.helpers:
                add_edge(self._vout(h), self._vin(newcomer), self._beta_int)
        # One throttled sink edge per instance; queries open the ones
        # belonging to the chosen collector.
        self._sink_edge = {}
        for node in range(self.instances):
            self._sink_edge[node] = add_edge(self._vout(node), self.sink, 0)

        self._eto = eto
        self._ecap = ecap
        self._adj = adj

    def _check_collector(self, collector) -> tuple[int, ...]:
        coll = tuple(sorted(set(collector)))
        if len(coll) != self.k:
            raise CodingError(f"collector must name {self.k} distinct nodes")
        for v in coll:
            if v not in self.active:
                raise CodingError(f"collector node {v} is not alive")
        return coll

    def _maxflow(self, collector, target: Optional[int]) -> int:
        ecap = self._ecap.copy()
        for v in collector:
            ecap[self._sink_edge[v]] = self.inf
        eto = self._eto
        adj = self._adj
        source, sink = 0, self.sink
        nvert = self.nvert
        flow = 0
        while True:
            # BFS layering on residual capacities.
            level = [-1] * nvert
            level[source] = 0
            queue = [source]
            for u in queue:
                for eid in adj[u]:
                    if ecap[eid] and level[eto[eid]] < 0:
                        level[eto[eid]] = level[u] + 1
                        queue.append(eto[eid])
            if level[sink] < 0:
                return flow
            ptr = [0] * nvert
            # DFS blocking flow, iterative.
            while True:
                path = []
                u = source
                while u != sink:
                    advanced = False
                    lst = adj[u]
                    while ptr[u] < len(lst):
                        eid = lst[ptr[u]]
                        v = eto[eid]
                        if ecap[eid] and level[v] == level[u] + 1:
                            path.append(eid)
                            u = v
                            advanced = True
                            break
                        ptr[u] += 1
                    if not advanced:
                        if u == source:
                            path = None
                        else:
                            level[u] = -1
                            eid = path.pop()
                            u = eto[eid ^ 1]
                            ptr[u] += 1
                        if path is None:
                            break
                if not path:
                    break
                push = min(ecap[eid] for eid in path)
                for eid in path:
                    ecap[eid] -= push
                    ecap[eid ^ 1] += push
                flow += push
                if target is not None and flow >= target:
                    return flow

    def min_cut(self, collector) -> Fraction:
        """Exact min-cut between the source and a k-node collector."""
        coll = self._check_collector(collector)
        return Fraction(self._maxflow(coll, None), self._scale)

    def admits(self, collector, size) -> bool:
        """True iff the collector's min-cut reaches ``size``.

        Stops augmenting as soon as the threshold is met, so this is
        much cheaper than ``min_cut`` when the answer is yes.
        """
        coll = self._check_collector(collector)
        need = Fraction(size) * self._scale
        target = -(-need.numerator // need.denominator)
        return self._maxflow(coll, target) >= need


@dataclass(frozen=True)
class FeasibilityResult:
    ok: bool
    history: Optional[tuple[RepairStage, ...]] = None
    collector: Optional[tuple[int, ...]] = None
    cut: Optional[Fraction] = None

    def __bool__(self) -> bool:
        return self.ok


def _collector_cuts_ok(
    graph: FlowGraph, size: Fraction, alpha: Fraction
) -> Optional[tuple[tuple[int, ...], Fraction]]:
    """First failing collector of the graph, or None if all pass."""
    n = graph.n
    fresh_ok = graph.k * alpha >= size
    for coll in combinations(sorted(graph.active), graph.k):
        if fresh_ok and coll[-1] < n:
            # A collector of never-failed originals cuts exactly k*alpha.
            continue
        if not graph.admits(coll, size):
            return coll, graph.min_cut(coll)
    return None


def feasible(
    n: int,
    k: int,
    d: int,
    alpha,
    beta,
    size,
    max_depth: int = 8,
    histories: int = 200,
    seed: int = 0,
) -> FeasibilityResult:
    """Empirical feasibility of an (alpha, beta) point over repair histories.

    Explores every canonical cascade up to k failures plus a seeded
    batch of random histories, checking every k-collector of each.
    Returns a witness (history, collector, exact cut) on failure.  A
    pass means no explored history broke the file, within this budget.
    """
    alpha = Fraction(alpha)
    beta = Fraction(beta)
    size = Fraction(size)
    if size <= 0:
        raise CodingError("file size must be positive")

    cascade_histories: list[list[RepairStage]] = [[]]
    for depth in range(1, k + 1):
        cascade_histories.append(canonical_cascade(n, k, d, depth))
    rng = random.Random(seed)
    random_histories = [
        random_history(n, d, rng.randrange(1, max_depth + 1), rng)
        for _ in range(histories)
    ]
    for hist in cascade_histories + random_histories:
        graph = FlowGraph(n, k, d, alpha, beta, hist)
        bad = _collector_cuts_ok(graph, size, alpha)
        if bad is not None:
            coll, cut = bad
            return FeasibilityResult(False, tuple(hist), coll, cut)
    return FeasibilityResult(True)
