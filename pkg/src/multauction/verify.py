"""Runtime checks of the auction's correctness argument.

All checks read a quiescent :class:`AuctionState` and never modify it.  They
work on rescaled, rounded weights, where the inequalities are exact; only
:func:`approx_ratio` uses original units.

Buyer queues hold pairs of an edge only for levels ``j_uv`` down to
``j_uv - k_min``.  Once a buyer has popped past all of them, the edge's
utility is below ``(1+eps)**(j_uv - k_min) <= eps * w(uv)`` rather than below
the buyer's current level, so the level-based bounds are taken at
``max(j_v, j_uv - k_min)`` and such exhausted edges are held to the
``eps * w(uv)`` bound instead of the competition bound.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable

from .auction import AuctionState
from .graph import BipartiteGraph, Matching

REL_TOL = 1e-9


def _tol(*xs: float) -> float:
    return REL_TOL * max(1.0, *(abs(x) for x in xs))


@dataclass
class CheckResult:
    name: str
    passed: bool
    #: Smallest slack seen (negative means violated), in rounded-weight units.
    margin: float = math.inf
    witness: Any = None
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"{status} {self.name} margin={self.margin + 0.0:.6g}"
        if self.witness is not None and not self.passed:
            out += f" witness={self.witness}"
        return out


class _Tracker:
    """Keeps the worst slack and the first violation's witness."""

    def __init__(self, name: str):
        self.result = CheckResult(name, True)

    def see(self, slack: float, tol: float, witness: Any) -> None:
        r = self.result
        if slack < r.margin:
            r.margin = slack
            if r.passed:
                r.witness = witness
        if slack < -tol and r.passed:
            r.passed = False
            r.witness = witness


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def render(self) -> str:
        return "\n".join(c.line() for c in self.checks)

    def to_dict(self) -> dict[str, bool]:
        return {c.name: c.passed for c in self.checks}


def _alive_edges(state: AuctionState, v: int) -> Iterable[int]:
    deleted, eu = state.deleted, state.eu
    return (e for e in state.adj_v[v] if not deleted[eu[e]])


def check_invariant_1(state: AuctionState) -> CheckResult:
    """Utility of every alive edge is at most (1+eps)**(level + 1), where
    level is the buyer's current level (or the edge's lowest pair level if
    that is higher)."""
    t = _Tracker("inv1")
    k_min = state.cfg.k_min
    exhausted = 0
    for v in range(state.n_v):
        jv = state.j_v[v]
        for e in _alive_edges(state, v):
            low = state.level[e] - k_min
            if low > jv:
                exhausted += 1
            bound = state.cfg.power(max(jv, low) + 1)
            util = state.util(e)
            t.see(bound - util, _tol(bound, util), ("edge", state.eu[e], v))
    t.result.details["exhausted_edges"] = exhausted
    return t.result


def check_invariant_2(state: AuctionState) -> CheckResult:
    """A matched buyer's utility is within (1-2eps) of every competitor that
    still has pairs at or below the buyer's level; exhausted competitors have
    utility at most (1+eps)**(j_uv - k_min)."""
    t = _Tracker("inv2")
    k_min = state.cfg.k_min
    f = 1.0 - 2.0 * state.cfg.eps
    for v in range(state.n_v):
        e = state.mate_v[v]
        if e < 0:
            continue
        mine = state.util(e)
        jv = state.j_v[v]
        for e2 in _alive_edges(state, v):
            if e2 == e:
                continue
            other = state.util(e2)
            low = state.level[e2] - k_min
            if low <= jv:
                t.see(mine - f * other, _tol(mine, other), ("competitor", state.eu[e2], v))
            else:
                bound = state.cfg.power(low)
                t.see(bound - other, _tol(bound, other), ("exhausted", state.eu[e2], v))
    return t.result


def check_invariant_3(state: AuctionState) -> CheckResult:
    """Unmatched alive goods have price 0; matched goods a positive price."""
    t = _Tracker("inv3")
    for u in range(state.n_u):
        if state.deleted[u]:
            continue
        y = state.y[u]
        if state.mate_u[u] < 0:
            t.see(-abs(y), 0.0, ("unmatched_priced", u))
        else:
            # Strict: a matched good must carry a positive price, no tolerance.
            t.see(y if y > 0 else -math.inf, 0.0, ("matched_unpriced", u))
    return t.result


def check_invariant_4(state: AuctionState) -> CheckResult:
    """Every buyer that has bid is matched or has an empty queue."""
    t = _Tracker("inv4")
    for v in range(state.n_v):
        if not state.touched[v] or state.mate_v[v] >= 0:
            continue
        left = state.q_end[v] - state.cursor[v]
        t.see(-float(left), 0.0, ("unmatched_with_queue", v, left))
    return t.result


def buyer_duals(state: AuctionState) -> list[float]:
    """y_v = utility of v's matched edge, or 0 when unmatched."""
    return [state.util(e) if e >= 0 else 0.0 for e in state.mate_v]


def check_dual_feasibility(state: AuctionState) -> CheckResult:
    """Approximate complementary slackness with eps_0 = 2 eps, eps_1 = 0.

    Every alive edge has y_u + y_v >= (1 - 2eps) w; matched edges have
    y_u + y_v = w; unmatched vertices carry zero duals; and an edge to an
    unmatched buyer has y_u >= (1 - eps) w.
    """
    t = _Tracker("dual")
    eps = state.cfg.eps
    y_v = buyer_duals(state)
    for u in range(state.n_u):
        if not state.deleted[u] and state.mate_u[u] < 0:
            t.see(-abs(state.y[u]), 0.0, ("unmatched_u_dual", u))
    for v in range(state.n_v):
        me = state.mate_v[v]
        if me >= 0:
            w = state.wt[me]
            s = state.y[state.eu[me]] + y_v[v]
            t.see(-abs(s - w), _tol(s, w), ("matched_not_tight", state.eu[me], v))
            t.see(y_v[v], 0.0, ("negative_buyer_dual", v))
        for e in _alive_edges(state, v):
            w = state.wt[e]
            yu = state.y[state.eu[e]]
            s = yu + y_v[v]
            t.see(s - (1.0 - 2.0 * eps) * w, _tol(s, w), ("edge", state.eu[e], v))
            if me < 0 and state.touched[v]:
                t.see(yu - (1.0 - eps) * w, _tol(yu, w), ("free_buyer_edge", state.eu[e], v))
    return t.result


# -- alternating paths ---------------------------------------------------------

def _components(m_edges: dict, s_edges: dict) -> list[tuple[bool, list]]:
    """Split the symmetric difference into paths and cycles.

    ``m_edges``/``s_edges`` map each vertex (('u', i) or ('v', j)) to its
    partner in M / M* restricted to the symmetric difference.  Returns
    (is_cycle, [(vertex, vertex, in_M), ...]) per component, edges in walk order.
    """
    adj: dict = defaultdict(list)
    for a, b in m_edges.items():
        adj[a].append((b, True))
    for a, b in s_edges.items():
        adj[a].append((b, False))
    seen: set = set()
    comps = []

    def walk(start) -> list:
        edges = []
        prev_kind = None
        cur = start
        seen.add(cur)
        while True:
            step = next(((b, k) for b, k in adj[cur] if k != prev_kind), None)
            if step is None:
                return edges
            b, k = step
            edges.append((cur, b, k))
            prev_kind = k
            if b in seen:
                return edges
            seen.add(b)
            cur = b

    for start in [x for x in adj if len(adj[x]) == 1]:
        if start not in seen:
            comps.append((False, walk(start)))
    for start in list(adj):
        if start not in seen:
            comps.append((True, walk(start)))
    return comps


def classify_component(is_cycle: bool, edges: list) -> str:
    """Case label of a component of M xor M*.

    ``1``: alternating cycle.  ``2a``: path between two U-vertices (one end
    edge in M*, the other in M).  ``2b``: path whose two end edges are both in
    M*.  ``2c``: any other path (between two V-vertices, or with both end
    edges in M).
    """
    if is_cycle:
        return "1"
    first, last = edges[0][2], edges[-1][2]
    if not first and not last:
        return "2b"
    if first != last and edges[0][0][0] == "u" and edges[-1][1][0] == "u":
        return "2a"
    return "2c"


def check_alternating_paths(state: AuctionState, m_star: Matching | Iterable[tuple[int, int]]
                            ) -> CheckResult:
    """Each component C of M xor M* has w(M & C) >= (1 - 2eps) w(M* & C).

    ``m_star`` must be a matching of the alive kept edges; weights are the
    rounded ones.
    """
    pairs = m_star.pairs if isinstance(m_star, Matching) else frozenset(m_star)
    wmap: dict[tuple[int, int], float] = {}
    for v in range(state.n_v):
        for e in _alive_edges(state, v):
            wmap[(state.eu[e], v)] = state.wt[e]
    us, vs = set(), set()
    for u, v in pairs:
        if (u, v) not in wmap:
            raise ValueError(f"M* pair ({u}, {v}) is not an alive edge")
        if u in us or v in vs:
            raise ValueError("M* is not a matching")
        us.add(u)
        vs.add(v)
    mine = {(state.eu[e], state.ev[e]) for e in state.matched_edges()}
    m_only = mine - pairs
    s_only = pairs - mine
    m_edges, s_edges = {}, {}
    for u, v in m_only:
        m_edges[("u", u)] = ("v", v)
        m_edges[("v", v)] = ("u", u)
    for u, v in s_only:
        s_edges[("u", u)] = ("v", v)
        s_edges[("v", v)] = ("u", u)

    t = _Tracker("paths")
    f = 1.0 - 2.0 * state.cfg.eps
    cases: dict[str, int] = defaultdict(int)
    for is_cycle, edges in _components(m_edges, s_edges):
        case = classify_component(is_cycle, edges)
        cases[case] += 1
        wm = ws = 0.0
        for a, b, in_m in edges:
            uv = (a[1], b[1]) if a[0] == "u" else (b[1], a[1])
            if in_m:
                wm += wmap[uv]
            else:
                ws += wmap[uv]
        path = [a for a, _, _ in edges] + [edges[-1][1]]
        t.see(wm - f * ws, _tol(wm, ws), (case, path))
    t.result.details["cases"] = dict(cases)
    return t.result


def rounded_graph(state: AuctionState) -> BipartiteGraph:
    """Alive kept edges with their rounded weights (the domain M* lives in)."""
    return BipartiteGraph.from_edges(state.n_u, state.n_v, [
        (state.eu[e], v, state.wt[e])
        for v in range(state.n_v) for e in _alive_edges(state, v)])


def approx_ratio(m: Matching, m_star: Matching) -> float:
    """w(M) / w(M*), with 0/0 taken as 1."""
    if m_star.total_weight == 0:
        return 1.0 if m.total_weight == 0 else math.inf
    return m.total_weight / m_star.total_weight


INVARIANT_CHECKS = (check_invariant_1, check_invariant_2, check_invariant_3,
                    check_invariant_4)


def verify_state(state: AuctionState, m_star: Matching | None = None
                 ) -> VerificationReport:
    """Run every checker; the path check needs M* on the rounded weights."""
    report = VerificationReport([c(state) for c in INVARIANT_CHECKS])
    report.checks.append(check_dual_feasibility(state))
    if m_star is not None:
        report.checks.append(check_alternating_paths(state, m_star))
    return report
