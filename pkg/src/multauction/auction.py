"""Multiplicative auction for approximate maximum weight bipartite matching.

U-vertices are goods with prices ``y[u]``; V-vertices are buyers.  Every
surviving edge ``uv`` of level ``j`` (its rounded weight is ``(1+eps)**j``)
puts ``k_min + 1`` pairs ``(i, uv)``, ``i = j, j-1, ..., j-k_min``, into the
buyer queue ``Q_v``; each queue is ordered by non-increasing level.  A buyer
consumes its queue front to back and takes the first good whose utility
``w(uv) - y[u]`` reaches the pair's threshold ``(1+eps)**i``, raising that
good's price by ``eps * utility``.  A buyer displaced in the process bids
again right away.

Queues live in two flat arrays (``pair_level``, ``pair_edge``); buyer ``v``
owns the segment ``[q_start[v], q_end[v])`` and a pop is a cursor increment.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graph import BipartiteGraph, Matching
from .weights import EpsilonConfig, ScaledGraph, preprocess


@dataclass(eq=False)
class AuctionState:
    """Live algorithm state.

    Edges are indexed internally (``0..len(eu)-1``); ``base_edge`` maps an
    internal edge back to the edge of the input graph when there is one.
    """

    cfg: EpsilonConfig
    n_u: int
    n_v: int
    eu: list[int]
    ev: list[int]
    wt: list[float]
    level: list[int]
    orig_w: list[float]
    base_edge: list[int]
    pair_level: array
    pair_edge: array
    q_start: list[int]
    q_end: list[int]
    cursor: list[int]
    y: list[float] = field(default_factory=list)
    mate_u: list[int] = field(default_factory=list)
    mate_v: list[int] = field(default_factory=list)
    j_v: list[int] = field(default_factory=list)
    touched: list[bool] = field(default_factory=list)
    deleted: list[bool] = field(default_factory=list)
    adj_v: list[list[int]] = field(default_factory=list)
    pops: int = 0
    skipped: int = 0
    bids: int = 0
    scale: float = 1.0
    #: When a list, match_r appends (v, level, edge, accepted, y_before, y_after).
    trace: list | None = None

    def __post_init__(self) -> None:
        if not self.y:
            self.y = [0.0] * self.n_u
        if not self.mate_u:
            self.mate_u = [-1] * self.n_u
        if not self.mate_v:
            self.mate_v = [-1] * self.n_v
        if not self.j_v:
            self.j_v = [self.cfg.k_max] * self.n_v
        if not self.touched:
            self.touched = [False] * self.n_v
        if not self.deleted:
            self.deleted = [False] * self.n_u
        if not self.adj_v:
            self.adj_v = [[] for _ in range(self.n_v)]
            for e, v in enumerate(self.ev):
                self.adj_v[v].append(e)

    @property
    def m(self) -> int:
        return len(self.eu)

    @property
    def total_pairs(self) -> int:
        return len(self.pair_level)

    def util(self, e: int) -> float:
        return self.wt[e] - self.y[self.eu[e]]

    def queue(self, v: int) -> list[tuple[int, int]]:
        """Remaining (level, edge) pairs of ``Q_v``."""
        lo, hi = self.cursor[v], self.q_end[v]
        return list(zip(self.pair_level[lo:hi], self.pair_edge[lo:hi]))

    def matched_edges(self) -> list[int]:
        return [e for e in self.mate_v if e >= 0]

    def rounded_weight(self) -> float:
        return math.fsum(self.wt[e] for e in self.matched_edges())

    def matching(self) -> Matching:
        """Current matching in original weight units."""
        es = self.matched_edges()
        return Matching(frozenset((self.eu[e], self.ev[e]) for e in es),
                        math.fsum(self.orig_w[e] for e in es))

    def pop_bound(self) -> int:
        return self.m * (self.cfg.k_min + 1)

    def snapshot(self) -> tuple:
        """Hashable image of everything mutable (used to prove checkers are pure)."""
        return (tuple(self.y), tuple(self.mate_u), tuple(self.mate_v),
                tuple(self.j_v), tuple(self.cursor), tuple(self.touched),
                tuple(self.deleted), self.pops, self.skipped, self.bids)


class LevelBuckets:
    """Buckets ``L_i`` for ``-k_min <= i <= k_max`` holding edge indices.

    Edge ``e`` of level ``j`` sits in the buckets ``j - k_min .. j``.
    """

    def __init__(self, cfg: EpsilonConfig):
        self.cfg = cfg
        self.buckets: list[list[int]] = [[] for _ in range(cfg.k_max + cfg.k_min + 1)]

    def __getitem__(self, i: int) -> list[int]:
        return self.buckets[i + self.cfg.k_min]

    @classmethod
    def from_levels(cls, levels: Iterable[int], cfg: EpsilonConfig) -> LevelBuckets:
        lb = cls(cfg)
        for e, j in enumerate(levels):
            for i in range(j, j - cfg.k_min - 1, -1):
                lb[i].append(e)
        return lb

    def drain(self, ev: list[int], n_v: int) -> list[list[tuple[int, int]]]:
        """Walk the buckets from ``k_max`` down, appending to per-buyer queues."""
        queues: list[list[tuple[int, int]]] = [[] for _ in range(n_v)]
        for i in range(self.cfg.k_max, -self.cfg.k_min - 1, -1):
            for e in self[i]:
                queues[ev[e]].append((i, e))
        return queues


def _sorted_pairs_buckets(level: list[int], ev: list[int], n_v: int,
                          cfg: EpsilonConfig) -> tuple[list[int], list[int], list[int]]:
    queues = LevelBuckets.from_levels(level, cfg).drain(ev, n_v)
    lev, edg, sizes = [], [], []
    for q in queues:
        sizes.append(len(q))
        for i, e in q:
            lev.append(i)
            edg.append(e)
    return lev, edg, sizes


def _sorted_pairs_radix(level: np.ndarray, ev: np.ndarray, n_v: int,
                        k_min: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Same order as the bucket pass: by buyer, level descending, then edge index.
    m = len(level)
    k = k_min + 1
    edge = np.repeat(np.arange(m, dtype=np.int32), k)
    lev = (np.repeat(level.astype(np.int32), k)
           - np.tile(np.arange(k, dtype=np.int32), m))
    buyer = ev.astype(np.int32)[edge]
    order = np.lexsort((edge, -lev, buyer))
    sizes = np.bincount(ev, minlength=n_v) * k if m else np.zeros(n_v, np.int64)
    return lev[order], edge[order], sizes


def build_queues(scaled: ScaledGraph, cfg: EpsilonConfig | None = None,
                 method: str = "radix") -> AuctionState:
    """Fresh state with every buyer queue filled and sorted.

    ``method="bucket"`` runs the literal bucket pass over ``L_i`` in pure
    Python; ``method="radix"`` produces the identical order with a stable
    numpy sort and is the default for speed.
    """
    cfg = cfg or scaled.cfg
    g = scaled.base
    kept = scaled.kept
    eu = g.eu[kept]
    ev = g.ev[kept]
    level = np.asarray(scaled.level, dtype=np.int64)
    if method == "radix":
        lev, edg, sizes = _sorted_pairs_radix(level, ev, g.n_v, cfg.k_min)
        pair_level = array("i", lev.astype(np.int32).tobytes())
        pair_edge = array("i", edg.astype(np.int32).tobytes())
        sizes = sizes.tolist()
    elif method == "bucket":
        lev, edg, sizes = _sorted_pairs_buckets(level.tolist(), ev.tolist(), g.n_v, cfg)
        pair_level = array("i", lev)
        pair_edge = array("i", edg)
    else:
        raise ValueError(f"unknown method {method!r}")
    q_start, q_end = [], []
    pos = 0
    for s in sizes:
        q_start.append(pos)
        pos += int(s)
        q_end.append(pos)
    return AuctionState(
        cfg=cfg, n_u=g.n_u, n_v=g.n_v,
        eu=eu.tolist(), ev=ev.tolist(), wt=scaled.wt.tolist(), level=level.tolist(),
        orig_w=g.ew[kept].tolist(), base_edge=kept.tolist(),
        pair_level=pair_level, pair_edge=pair_edge,
        q_start=q_start, q_end=q_end, cursor=list(q_start), scale=scaled.scale)


def match_r(state: AuctionState, v: int, log: list | None = None) -> None:
    """Let buyer ``v`` bid, then keep re-bidding for whoever gets displaced.

    If ``log`` is given, each accepted bid appends ``(displaced_edge, new_edge)``
    with ``displaced_edge == -1`` when the good was free.
    """
    pl, pe = state.pair_level, state.pair_edge
    eu, ev, wt = state.eu, state.ev, state.wt
    y, mate_u, mate_v = state.y, state.mate_u, state.mate_v
    cursor, q_end, j_v = state.cursor, state.q_end, state.j_v
    deleted = state.deleted
    table = state.cfg.power_table
    off = state.cfg.k_min
    eps = state.cfg.eps
    trace = state.trace
    pops = skipped = bids = 0
    while v >= 0:
        state.touched[v] = True
        c, end = cursor[v], q_end[v]
        nxt = -1
        while c < end:
            j = pl[c]
            e = pe[c]
            c += 1
            pops += 1
            j_v[v] = j
            u = eu[e]
            if deleted[u]:
                skipped += 1
                continue
            util = wt[e] - y[u]
            if util >= table[j + off]:
                before = y[u]
                y[u] = before + eps * util
                bids += 1
                old = mate_u[u]
                if old >= 0:
                    nxt = ev[old]
                    mate_v[nxt] = -1
                mate_u[u] = e
                mate_v[v] = e
                if log is not None:
                    log.append((old, e))
                if trace is not None:
                    trace.append((v, j, e, True, before, y[u]))
                break
            if trace is not None:
                trace.append((v, j, e, False, y[u], y[u]))
        cursor[v] = c
        v = nxt
    state.pops += pops
    state.skipped += skipped
    state.bids += bids


def empty_state(g: BipartiteGraph, cfg: EpsilonConfig) -> AuctionState:
    return AuctionState(
        cfg=cfg, n_u=g.n_u, n_v=g.n_v, eu=[], ev=[], wt=[], level=[], orig_w=[],
        base_edge=[], pair_level=array("i"), pair_edge=array("i"),
        q_start=[0] * g.n_v, q_end=[0] * g.n_v, cursor=[0] * g.n_v)


def prepare(g: BipartiteGraph, eps_prime: float, eps: float | None = None,
            method: str = "radix") -> AuctionState:
    """Preprocess ``g`` and build the queues, without running any bids."""
    cfg = EpsilonConfig.for_instance(eps_prime, g.n, eps)
    if g.m == 0 or not g.ew.max() > 0:
        return empty_state(g, cfg)
    return build_queues(preprocess(g, cfg), cfg, method)


def solve(g: BipartiteGraph, eps_prime: float, eps: float | None = None,
          order: Iterable[int] | None = None, method: str = "radix",
          trace: bool = False) -> tuple[Matching, AuctionState]:
    """(1 - eps_prime)-approximate maximum weight matching of ``g``.

    Buyers bid in ascending index order unless ``order`` is given.
    """
    state = prepare(g, eps_prime, eps, method)
    if trace:
        state.trace = []
    for v in (range(g.n_v) if order is None else order):
        match_r(state, v)
    return state.matching(), state
