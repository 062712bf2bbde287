"""Benchmark grid: multiplicative auction vs the classical additive auction.

The additive auction raises a price by a fixed ``step`` per bid, so its round
count grows with the weight range; the multiplicative one does not.  It is
kept here as a reference point only.
"""

from __future__ import annotations

import json
import math
import time
from collections import deque
from dataclasses import asdict, dataclass

from .auction import solve
from .graph import BipartiteGraph, Matching, gen_random
from .oracle import hungarian_exact
from .verify import approx_ratio


def additive_auction(g: BipartiteGraph, step: float,
                     max_rounds: int | None = None) -> tuple[Matching, int]:
    """Classical auction: the best-utility good goes to the bidder and its
    price rises by ``step``.  Returns the matching and the number of rounds
    (bids processed)."""
    if not step > 0:
        raise ValueError("step must be positive")
    y = [0.0] * g.n_u
    owner = [-1] * g.n_u
    nbrs = [[(int(g.eu[e]), float(g.ew[e])) for e in es] for es in g.adj_v]
    free = deque(range(g.n_v))
    rounds = 0
    while free:
        if max_rounds is not None and rounds >= max_rounds:
            raise RuntimeError(f"additive auction exceeded {max_rounds} rounds")
        v = free.popleft()
        rounds += 1
        best_u, best = -1, -math.inf
        for u, w in nbrs[v]:
            util = w - y[u]
            if util > best:
                best_u, best = u, util
        if best_u < 0 or best < 0:
            continue
        prev = owner[best_u]
        owner[best_u] = v
        y[best_u] += step
        if prev >= 0:
            free.append(prev)
    pairs = [(u, v) for u, v in enumerate(owner) if v >= 0]
    return Matching.from_pairs(g, pairs), rounds


@dataclass(frozen=True)
class Cell:
    n_u: int
    n_v: int
    m: int
    w_max: float
    eps_prime: float


@dataclass
class BenchRow:
    algo: str
    n_u: int
    n_v: int
    m: int
    w_max: float
    eps_prime: float
    weight: float
    oracle_weight: float | None
    ratio: float | None
    count: int
    k_min: int | None
    bound: int | None
    seconds: float


def load_config(text: str) -> tuple[list[Cell], int, bool]:
    """Parse ``{"seed": int, "integer": bool, "cells": [{...}, ...]}``."""
    try:
        doc = json.loads(text)
        cells = [Cell(int(c["n_u"]), int(c["n_v"]), int(c["m"]), float(c["w_max"]),
                      float(c["eps_prime"])) for c in doc["cells"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise ValueError(f"bad bench config: {exc}") from None
    return cells, int(doc.get("seed", 0)), bool(doc.get("integer", False))


def run_cell(cell: Cell, algo: str, seed: int, integer: bool = False,
             oracle: bool = True) -> BenchRow:
    g = gen_random(cell.n_u, cell.n_v, cell.m, cell.w_max, seed, integer=integer)
    t0 = time.perf_counter()
    if algo == "multiplicative":
        matching, state = solve(g, cell.eps_prime)
        count, k_min, bound = state.pops, state.cfg.k_min, state.pop_bound()
    elif algo == "additive":
        matching, count = additive_auction(g, cell.eps_prime)
        k_min = bound = None
    else:
        raise ValueError(f"unknown algo {algo!r}")
    seconds = time.perf_counter() - t0
    opt = hungarian_exact(g).matching if oracle else None
    return BenchRow(algo, cell.n_u, cell.n_v, cell.m, cell.w_max, cell.eps_prime,
                    matching.total_weight, opt.total_weight if opt else None,
                    approx_ratio(matching, opt) if opt else None,
                    count, k_min, bound, seconds)


def run_grid(cells: list[Cell], algos: list[str], seed: int, integer: bool = False,
             oracle: bool = True) -> list[BenchRow]:
    return [run_cell(c, a, seed, integer, oracle) for c in cells for a in algos]


COLUMNS = ("algo", "n_u", "n_v", "m", "w_max", "eps_prime", "weight",
           "ratio", "count", "bound", "seconds")


def format_table(rows: list[BenchRow]) -> str:
    def cell(x) -> str:
        if x is None:
            return "-"
        if isinstance(x, float):
            return f"{x:.6g}"
        return str(x)

    table = [COLUMNS] + [tuple(cell(asdict(r)[k]) for k in COLUMNS) for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(COLUMNS))]
    return "\n".join("  ".join(x.rjust(w) for x, w in zip(row, widths)) for row in table)


def format_csv(rows: list[BenchRow]) -> str:
    keys = list(asdict(rows[0])) if rows else list(COLUMNS)
    lines = [",".join(keys)]
    for r in rows:
        d = asdict(r)
        lines.append(",".join("" if d[k] is None else str(d[k]) for k in keys))
    return "\n".join(lines) + "\n"
