"""Dynamic matching under U-vertex deletions and V-vertex insertions.

The price of every good only ever goes up, and every buyer's queue is only
ever consumed from the front, so both operation types reuse the static
machinery without undoing any work:

* deleting ``u`` tombstones it (its pairs are skipped lazily when popped) and
  lets its former buyer bid again;
* inserting ``v`` builds a fresh sorted queue from the weight-sorted edge list
  and lets ``v`` bid.

Weights are scaled once, against a declared ceiling ``w_cap`` and a vertex
budget ``n_cap``, so the power table and ``k_max`` stay fixed for the whole
run.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .auction import AuctionState, build_queues, empty_state, match_r
from .graph import BipartiteGraph, DeleteU, InsertV, Matching, OpsScript
from .weights import EpsilonConfig, ScaledGraph, scale_levels

log = logging.getLogger(__name__)

#: Default vertex budget as a multiple of the initial vertex count.
DEFAULT_HEADROOM = 4


@dataclass(frozen=True)
class MatchingDelta:
    removed: frozenset[tuple[int, int]]
    added: frozenset[tuple[int, int]]
    new_total_weight: float

    def __bool__(self) -> bool:
        return bool(self.removed or self.added)

    def apply(self, pairs: frozenset[tuple[int, int]]) -> frozenset[tuple[int, int]]:
        return (pairs - self.removed) | self.added


class DynamicMatcher:
    """Maintains a (1 - eps')-approximate matching across operations.

    Operations must be serialized by the caller.
    """

    def __init__(self, g: BipartiteGraph, eps_prime: float, w_cap: float,
                 n_cap: int | None = None, eps: float | None = None,
                 method: str = "radix"):
        if not w_cap > 0:
            raise ValueError("w_cap must be positive")
        if g.m and g.ew.max() > w_cap:
            raise ValueError(f"initial edge weight {g.ew.max()} exceeds w_cap {w_cap}")
        if n_cap is None:
            n_cap = DEFAULT_HEADROOM * max(g.n, 1)
        if n_cap < g.n:
            raise ValueError("n_cap is smaller than the initial vertex count")
        self.w_cap = float(w_cap)
        self.n_cap = int(n_cap)
        cfg = EpsilonConfig.for_instance(eps_prime, self.n_cap, eps)
        self.scale = cfg.eps_prime * self.w_cap / self.n_cap
        keep, level, wt = scale_levels(g.ew, self.scale, cfg)
        kept = np.flatnonzero(keep)
        if len(kept):
            scaled = ScaledGraph(g, cfg, self.scale, kept, level, wt, g.m - len(kept))
            self.state: AuctionState = build_queues(scaled, cfg, method)
        else:
            self.state = empty_state(g, cfg)
        self.state.scale = self.scale
        self.initial_edge_count = g.m
        self._edge_log = list(g.edges())
        self.inserted_edge_count = 0
        self.dropped_count = g.m - len(kept)
        self.op_count = 0
        for v in range(g.n_v):
            match_r(self.state, v)

    @property
    def cfg(self) -> EpsilonConfig:
        return self.state.cfg

    @property
    def n_u(self) -> int:
        return self.state.n_u

    @property
    def n_v(self) -> int:
        return self.state.n_v

    def is_alive(self, u: int) -> bool:
        return 0 <= u < self.n_u and not self.state.deleted[u]

    def pop_bound(self) -> int:
        return (self.initial_edge_count + self.inserted_edge_count) * (self.cfg.k_min + 1)

    def current_matching(self) -> Matching:
        return self.state.matching()

    def _delta(self, bids: list[tuple[int, int]], removed: list[int]) -> MatchingDelta:
        s = self.state
        gone = set(removed)
        came: set[int] = set()
        for old, new in bids:
            if old >= 0:
                if old in came:
                    came.discard(old)
                else:
                    gone.add(old)
            came.add(new)
        both = gone & came
        gone -= both
        came -= both
        return MatchingDelta(
            frozenset((s.eu[e], s.ev[e]) for e in gone),
            frozenset((s.eu[e], s.ev[e]) for e in came),
            math.fsum(s.orig_w[e] for e in s.matched_edges()))

    def delete_u(self, u: int) -> MatchingDelta:
        """Remove good ``u``; its buyer, if any, bids again."""
        s = self.state
        if not 0 <= u < s.n_u:
            raise IndexError(f"u-index {u} out of range")
        if s.deleted[u]:
            raise ValueError(f"u-index {u} already deleted")
        s.deleted[u] = True
        self.op_count += 1
        e = s.mate_u[u]
        if e < 0:
            return self._delta([], [])
        v = s.ev[e]
        s.mate_u[u] = -1
        s.mate_v[v] = -1
        bids: list[tuple[int, int]] = []
        match_r(s, v, bids)
        return self._delta(bids, [e])

    def insert_v(self, edges: Sequence[tuple[int, float]],
                 sort: bool = False) -> tuple[int, MatchingDelta]:
        """Add a buyer with the given (u, weight) edges, heaviest first.

        Unsorted input is rejected unless ``sort=True``.
        """
        s = self.state
        edges = [(int(u), float(w)) for u, w in edges]
        seen = set()
        for u, w in edges:
            if not self.is_alive(u):
                raise ValueError(f"u-index {u} is unknown or deleted")
            if u in seen:
                raise ValueError(f"repeated u-index {u}")
            seen.add(u)
            if not 0 < w <= self.w_cap:
                raise ValueError(f"weight {w} outside (0, {self.w_cap}]")
        if any(b[1] > a[1] for a, b in zip(edges, edges[1:])):
            if not sort:
                raise ValueError("insert edges must be sorted by non-increasing weight")
            edges.sort(key=lambda p: -p[1])
        if s.n_v + 1 + s.n_u > self.n_cap:
            log.warning("vertex count %d exceeds n_cap %d; approximation is no "
                        "longer covered by the fixed scaling", s.n_v + 1 + s.n_u,
                        self.n_cap)

        v = s.n_v
        s.n_v += 1
        s.mate_v.append(-1)
        s.j_v.append(s.cfg.k_max)
        s.touched.append(False)
        s.adj_v.append([])
        self.inserted_edge_count += len(edges)
        self.op_count += 1
        self._edge_log.extend((u, v, w) for u, w in edges)

        ws = np.array([w for _, w in edges], dtype=float)
        keep, levels, wts = scale_levels(ws, self.scale, s.cfg)
        self.dropped_count += int(len(edges) - keep.sum())
        new_edges = []
        for (u, w), j, wt in zip((p for p, k in zip(edges, keep) if k),
                                 levels.tolist(), wts.tolist()):
            e = len(s.eu)
            s.eu.append(u)
            s.ev.append(v)
            s.wt.append(wt)
            s.level.append(j)
            s.orig_w.append(w)
            s.base_edge.append(-1)
            s.adj_v[v].append(e)
            new_edges.append((j, e))

        start = len(s.pair_level)
        if new_edges:
            # Edges arrive sorted, so levels run from the first edge's level
            # down to the last one's minus k_min.
            k_min = s.cfg.k_min
            top = new_edges[0][0]
            bins: list[list[int]] = [[] for _ in range(top - new_edges[-1][0] + k_min + 1)]
            for j, e in new_edges:
                for i in range(j, j - k_min - 1, -1):
                    bins[top - i].append(e)
            for off, b in enumerate(bins):
                s.pair_level.extend([top - off] * len(b))
                s.pair_edge.extend(b)
        s.q_start.append(start)
        s.q_end.append(len(s.pair_level))
        s.cursor.append(start)

        bids: list[tuple[int, int]] = []
        match_r(s, v, bids)
        return v, self._delta(bids, [])

    def apply(self, op: DeleteU | InsertV) -> tuple[int | None, MatchingDelta]:
        if isinstance(op, DeleteU):
            return None, self.delete_u(op.u)
        return self.insert_v(op.edges)

    def replay(self, script: OpsScript | Iterable[DeleteU | InsertV]
               ) -> list[MatchingDelta]:
        return [self.apply(op)[1] for op in script]

    def alive_graph(self) -> BipartiteGraph:
        """Current graph in original units: every edge ever given (including
        those too light to enter the queues) whose U-end is alive."""
        deleted = self.state.deleted
        return BipartiteGraph.from_edges(
            self.n_u, self.n_v, [p for p in self._edge_log if not deleted[p[0]]])


def new_dynamic(g: BipartiteGraph, eps_prime: float, w_cap: float,
                n_cap: int | None = None, eps: float | None = None) -> DynamicMatcher:
    return DynamicMatcher(g, eps_prime, w_cap, n_cap, eps)
