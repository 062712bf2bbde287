"""Exact maximum weight matchings, for checking the approximate solvers.

``hungarian_exact`` is a shortest-augmenting-path Hungarian method with
vertex potentials; ``brute_force_exact`` is an exhaustive dynamic program over
subsets of the smaller side.  The two share no code.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .graph import BipartiteGraph, Matching

HUNGARIAN_CAP = 2000
BRUTE_FORCE_CAP = 12


class Method(enum.Enum):
    HUNGARIAN = "hungarian"
    BRUTE_FORCE = "brute_force"


@dataclass(frozen=True)
class OracleResult:
    matching: Matching
    optimal_weight: float
    method: Method
    #: Optimal LP duals (Hungarian only): y_u + y_v >= w(uv), tight on the
    #: matching, zero on unmatched vertices.
    y_u: np.ndarray | None = None
    y_v: np.ndarray | None = None


def _assignment(cost: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Min-cost assignment of every row of ``cost`` (rows <= cols).

    Returns (col_of_row, row potentials, col potentials) with
    ``a[i] + b[j] <= cost[i, j]`` everywhere and equality on the assignment.
    """
    n, m = cost.shape
    inf = math.inf
    a = np.zeros(n + 1)
    b = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)  # row (1-based) owning column j; 0 = free
    way = np.zeros(m + 1, dtype=np.int64)
    c = np.zeros((n + 1, m + 1))
    c[1:, 1:] = cost
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = c[i0] - a[i0] - b
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            cand = np.where(free, minv, inf)
            j1 = int(np.argmin(cand))
            delta = cand[j1]
            a[p[used]] += delta
            b[used] -= delta
            minv[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of_row = np.full(n, -1, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j]:
            col_of_row[p[j] - 1] = j - 1
    return col_of_row, a[1:], b[1:]


def hungarian_exact(g: BipartiteGraph, cap: int = HUNGARIAN_CAP) -> OracleResult:
    """Exact maximum weight matching; non-edges act as zero-weight slack."""
    if g.n > cap:
        raise ValueError(f"instance has {g.n} vertices, above the cap of {cap}")
    if g.m == 0:
        return OracleResult(Matching.empty(), 0.0, Method.HUNGARIAN,
                            np.zeros(g.n_u), np.zeros(g.n_v))
    w = np.zeros((g.n_u, g.n_v))
    w[g.eu, g.ev] = g.ew
    transpose = g.n_u > g.n_v
    if transpose:
        w = w.T
    rows, cols = w.shape
    # Padding to a square with zero columns keeps potentials well defined.
    square = np.zeros((rows, cols + rows))
    square[:, :cols] = w
    col_of_row, a, b = _assignment(-square)
    # Max-form duals, shifted so the smallest column dual is zero; then all
    # duals are non-negative and vanish on zero-weight assignments.
    yr, yc = -a, -b
    shift = yc.min()
    yr, yc = yr + shift, yc - shift
    yc = yc[:cols]
    pairs = []
    for r, c in enumerate(col_of_row.tolist()):
        if c < cols and w[r, c] > 0:
            pairs.append((c, r) if transpose else (r, c))
    y_u, y_v = (yc, yr) if transpose else (yr, yc)
    matching = Matching.from_pairs(g, pairs)
    return OracleResult(matching, matching.total_weight, Method.HUNGARIAN, y_u, y_v)


def brute_force_exact(g: BipartiteGraph, cap: int = BRUTE_FORCE_CAP) -> OracleResult:
    """Exact maximum weight matching by a DP over subsets of the smaller side."""
    small_is_u = g.n_u <= g.n_v
    s = g.n_u if small_is_u else g.n_v
    if s > cap:
        raise ValueError(f"smaller side has {s} vertices, above the cap of {cap}")
    if g.m == 0:
        return OracleResult(Matching.empty(), 0.0, Method.BRUTE_FORCE)
    large_adj = g.adj_v if small_is_u else g.adj_u
    small_end = g.eu if small_is_u else g.ev
    size = 1 << s
    masks = np.arange(size)
    best = np.full(size, -math.inf)
    best[0] = 0.0
    # choice[k][mask]: edge used by the k-th large vertex in the best solution
    # whose used-set is ``mask``, or -1.
    choice = []
    for es in large_adj:
        nxt = best.copy()
        pick = np.full(size, -1, dtype=np.int64)
        for e in es:
            bit = 1 << int(small_end[e])
            has = (masks & bit) != 0
            cand = np.where(has, best[masks ^ bit] + g.ew[e], -math.inf)
            upd = cand > nxt
            nxt[upd] = cand[upd]
            pick[upd] = e
        best = nxt
        choice.append(pick)
    mask = int(np.argmax(best))
    total = best[mask]
    pairs = []
    for pick in reversed(choice):
        e = int(pick[mask])
        if e >= 0:
            pairs.append((int(g.eu[e]), int(g.ev[e])))
            mask ^= 1 << int(small_end[e])
    pairs = [(u, v) for u, v in pairs if g.weight(u, v) > 0]
    matching = Matching.from_pairs(g, pairs)
    assert math.isclose(matching.total_weight, total, rel_tol=1e-9, abs_tol=1e-12)
    return OracleResult(matching, matching.total_weight, Method.BRUTE_FORCE)
