"""Weighted bipartite graphs, matchings, text formats and random instances.

Vertices on each side are dense 0-based indices.  Edge ``e`` joins
``U``-vertex ``g.eu[e]`` with ``V``-vertex ``g.ev[e]`` and has weight
``g.ew[e]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO, Union

import numpy as np


class FormatError(ValueError):
    """Malformed graph or ops-script text.  Carries the 1-based line number."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Immutable simple bipartite graph with non-negative edge weights."""

    n_u: int
    n_v: int
    eu: np.ndarray
    ev: np.ndarray
    ew: np.ndarray
    adj_u: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    adj_v: tuple[tuple[int, ...], ...] = field(init=False, repr=False)
    _index: dict[tuple[int, int], int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_u < 0 or self.n_v < 0:
            raise ValueError("vertex counts must be non-negative")
        eu = _frozen(np.asarray(self.eu, dtype=np.int64).copy())
        ev = _frozen(np.asarray(self.ev, dtype=np.int64).copy())
        ew = _frozen(np.asarray(self.ew, dtype=np.float64).copy())
        if not (eu.shape == ev.shape == ew.shape) or eu.ndim != 1:
            raise ValueError("edge arrays must be 1-d and of equal length")
        if len(eu):
            if eu.min() < 0 or eu.max() >= self.n_u:
                raise ValueError("u-index out of range")
            if ev.min() < 0 or ev.max() >= self.n_v:
                raise ValueError("v-index out of range")
            if not np.all(np.isfinite(ew)) or ew.min() < 0:
                raise ValueError("weights must be finite and non-negative")

        index: dict[tuple[int, int], int] = {}
        adj_u: list[list[int]] = [[] for _ in range(self.n_u)]
        adj_v: list[list[int]] = [[] for _ in range(self.n_v)]
        for e, (u, v) in enumerate(zip(eu.tolist(), ev.tolist())):
            if (u, v) in index:
                raise ValueError(f"duplicate edge ({u}, {v})")
            index[(u, v)] = e
            adj_u[u].append(e)
            adj_v[v].append(e)

        object.__setattr__(self, "eu", eu)
        object.__setattr__(self, "ev", ev)
        object.__setattr__(self, "ew", ew)
        object.__setattr__(self, "adj_u", tuple(map(tuple, adj_u)))
        object.__setattr__(self, "adj_v", tuple(map(tuple, adj_v)))
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_edges(cls, n_u: int, n_v: int,
                   edges: Iterable[tuple[int, int, float]]) -> BipartiteGraph:
        edges = list(edges)
        if not edges:
            return cls(n_u, n_v, np.empty(0, np.int64), np.empty(0, np.int64),
                       np.empty(0, np.float64))
        us, vs, ws = zip(*edges)
        return cls(n_u, n_v, np.array(us), np.array(vs), np.array(ws, dtype=float))

    @property
    def m(self) -> int:
        return len(self.eu)

    @property
    def n(self) -> int:
        return self.n_u + self.n_v

    def edges(self) -> Iterator[tuple[int, int, float]]:
        return zip(self.eu.tolist(), self.ev.tolist(), self.ew.tolist())

    def edge_id(self, u: int, v: int) -> int | None:
        return self._index.get((u, v))

    def weight(self, u: int, v: int) -> float:
        e = self._index.get((u, v))
        if e is None:
            raise KeyError((u, v))
        return float(self.ew[e])

    def subgraph(self, keep_u: Iterable[bool]) -> BipartiteGraph:
        """Graph with the same index space but only edges to kept U-vertices."""
        keep = np.asarray(list(keep_u), dtype=bool)
        mask = keep[self.eu] if self.m else np.zeros(0, bool)
        return BipartiteGraph(self.n_u, self.n_v, self.eu[mask], self.ev[mask],
                              self.ew[mask])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self.n_u == other.n_u and self.n_v == other.n_v
                and np.array_equal(self.eu, other.eu)
                and np.array_equal(self.ev, other.ev)
                and np.array_equal(self.ew, other.ew))

    def __repr__(self) -> str:
        return f"BipartiteGraph(n_u={self.n_u}, n_v={self.n_v}, m={self.m})"


@dataclass(frozen=True)
class Matching:
    """A set of (u, v) pairs and its weight in original units."""

    pairs: frozenset[tuple[int, int]]
    total_weight: float

    @classmethod
    def from_pairs(cls, g: BipartiteGraph,
                   pairs: Iterable[tuple[int, int]]) -> Matching:
        pairs = frozenset((int(u), int(v)) for u, v in pairs)
        validate_matching(g, pairs)
        return cls(pairs, math.fsum(g.weight(u, v) for u, v in pairs))

    @classmethod
    def empty(cls) -> Matching:
        return cls(frozenset(), 0.0)

    def __len__(self) -> int:
        return len(self.pairs)

    def mate_of_u(self) -> dict[int, int]:
        return {u: v for u, v in self.pairs}

    def mate_of_v(self) -> dict[int, int]:
        return {v: u for u, v in self.pairs}


def validate_matching(g: BipartiteGraph, pairs: Iterable[tuple[int, int]]) -> None:
    """Raise ValueError unless ``pairs`` is a matching of ``g``."""
    seen_u: set[int] = set()
    seen_v: set[int] = set()
    for u, v in pairs:
        if g.edge_id(u, v) is None:
            raise ValueError(f"({u}, {v}) is not an edge")
        if u in seen_u or v in seen_v:
            raise ValueError(f"vertex of ({u}, {v}) matched twice")
        seen_u.add(u)
        seen_v.add(v)


# -- graph file format -------------------------------------------------------

def _tokens(text: Union[str, TextIO]) -> Iterator[tuple[int, list[str]]]:
    lines = text.splitlines() if isinstance(text, str) else text
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"bad {what} {tok!r}", lineno) from None


def _weight(tok: str, lineno: int) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise FormatError(f"bad weight {tok!r}", lineno) from None
    if not math.isfinite(w):
        raise FormatError(f"non-finite weight {tok!r}", lineno)
    if w < 0:
        raise FormatError(f"negative weight {tok!r}", lineno)
    return w


def parse_graph(text: Union[str, TextIO]) -> BipartiteGraph:
    """Read the ``p bip`` line-oriented graph format."""
    header = None
    us: list[int] = []
    vs: list[int] = []
    ws: list[float] = []
    seen: set[tuple[int, int]] = set()
    for lineno, tok in _tokens(text):
        if header is None:
            if len(tok) != 5 or tok[0] != "p" or tok[1] != "bip":
                raise FormatError("expected header 'p bip <n_u> <n_v> <m>'", lineno)
            header = tuple(_int(t, lineno, "count") for t in tok[2:])
            if min(header) < 0:
                raise FormatError("negative count in header", lineno)
            continue
        if tok[0] != "e" or len(tok) != 4:
            raise FormatError("expected edge line 'e <u> <v> <w>'", lineno)
        n_u, n_v, m = header
        if len(us) == m:
            raise FormatError(f"more than the declared {m} edges", lineno)
        u = _int(tok[1], lineno, "u-index")
        v = _int(tok[2], lineno, "v-index")
        if not 0 <= u < n_u:
            raise FormatError(f"u-index {u} out of range", lineno)
        if not 0 <= v < n_v:
            raise FormatError(f"v-index {v} out of range", lineno)
        if (u, v) in seen:
            raise FormatError(f"duplicate edge ({u}, {v})", lineno)
        seen.add((u, v))
        us.append(u)
        vs.append(v)
        ws.append(_weight(tok[3], lineno))
    if header is None:
        raise FormatError("missing header")
    n_u, n_v, m = header
    if len(us) != m:
        raise FormatError(f"declared {m} edges, found {len(us)}")
    return BipartiteGraph(n_u, n_v, np.array(us, dtype=np.int64),
                          np.array(vs, dtype=np.int64), np.array(ws, dtype=float))


def format_weight(w: float) -> str:
    # repr is the shortest string that round-trips; integral values print bare.
    if w.is_integer() and abs(w) < 2**53:
        return str(int(w))
    return repr(w)


def write_graph(g: BipartiteGraph) -> str:
    lines = [f"p bip {g.n_u} {g.n_v} {g.m}"]
    lines.extend(f"e {u} {v} {format_weight(w)}" for u, v, w in g.edges())
    return "\n".join(lines) + "\n"


# -- ops scripts --------------------------------------------------------------

@dataclass(frozen=True)
class DeleteU:
    u: int
    lineno: int = 0


@dataclass(frozen=True)
class InsertV:
    label: str
    edges: tuple[tuple[int, float], ...]
    lineno: int = 0


Op = Union[DeleteU, InsertV]


@dataclass(frozen=True)
class OpsScript:
    ops: tuple[Op, ...]

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self) -> Iterator[Op]:
        return iter(self.ops)


def parse_ops_script(text: Union[str, TextIO], n_u: int | None = None) -> OpsScript:
    """Parse ``del``/``add`` lines.

    When ``n_u`` is given, U-indices are also checked against the alive set
    as it evolves through the script.
    """
    ops: list[Op] = []
    deleted: set[int] = set()

    def check_u(u: int, lineno: int) -> None:
        if u < 0 or (n_u is not None and u >= n_u):
            raise FormatError(f"u-index {u} out of range", lineno)
        if u in deleted:
            raise FormatError(f"u-index {u} already deleted", lineno)

    for lineno, tok in _tokens(text):
        if tok[0] == "del":
            if len(tok) != 2:
                raise FormatError("expected 'del <u-index>'", lineno)
            u = _int(tok[1], lineno, "u-index")
            check_u(u, lineno)
            deleted.add(u)
            ops.append(DeleteU(u, lineno))
        elif tok[0] == "add":
            if len(tok) < 2 or len(tok) % 2:
                raise FormatError("expected 'add <v-label> (<u> <w>)*'", lineno)
            edges = []
            for a, b in zip(tok[2::2], tok[3::2]):
                u = _int(a, lineno, "u-index")
                check_u(u, lineno)
                edges.append((u, _weight(b, lineno)))
            if len({u for u, _ in edges}) != len(edges):
                raise FormatError("repeated u-index in insert", lineno)
            for (_, w1), (_, w2) in zip(edges, edges[1:]):
                if w2 > w1:
                    raise FormatError(
                        "insert edge weights must be non-increasing; sort them first",
                        lineno)
            ops.append(InsertV(tok[1], tuple(edges), lineno))
        else:
            raise FormatError(f"unknown op {tok[0]!r}", lineno)
    return OpsScript(tuple(ops))


def write_ops_script(script: OpsScript) -> str:
    out = []
    for op in script:
        if isinstance(op, DeleteU):
            out.append(f"del {op.u}")
        else:
            parts = [f"{u} {format_weight(w)}" for u, w in op.edges]
            out.append(" ".join(["add", op.label, *parts]))
    return "\n".join(out) + ("\n" if out else "")


# -- random instances ---------------------------------------------------------

def gen_random(n_u: int, n_v: int, m: int, w_max: float, seed: int,
               integer: bool = False) -> BipartiteGraph:
    """``m`` distinct uniform pairs with weights uniform in (0, w_max].

    With ``integer=True`` weights are uniform integers in [1, w_max].
    """
    if m < 0 or m > n_u * n_v:
        raise ValueError(f"cannot place {m} edges in a {n_u}x{n_v} bipartition")
    if not w_max > 0:
        raise ValueError("w_max must be positive")
    rng = np.random.default_rng(seed)
    ids = np.sort(rng.choice(n_u * n_v, size=m, replace=False)) if m else \
        np.empty(0, np.int64)
    if integer:
        w = rng.integers(1, int(w_max), size=m, endpoint=True).astype(float)
    else:
        w = w_max * (1.0 - rng.random(m))
    return BipartiteGraph(n_u, n_v, ids // n_v, ids % n_v, w)


def gen_ops_script(g: BipartiteGraph, n_ops: int, seed: int, w_max: float,
                   p_delete: float = 0.3, max_degree: int = 6,
                   integer: bool = False) -> OpsScript:
    """Random interleaving of U-deletions and V-insertions legal for ``g``.

    Inserted edge lists are emitted sorted by weight, heaviest first.
    """
    rng = np.random.default_rng(seed)
    alive = list(range(g.n_u))
    ops: list[Op] = []
    next_label = g.n_v
    for _ in range(n_ops):
        if alive and (rng.random() < p_delete):
            u = alive.pop(int(rng.integers(len(alive))))
            ops.append(DeleteU(u))
            continue
        deg = int(rng.integers(0, min(max_degree, len(alive)) + 1))
        us = rng.choice(len(alive), size=deg, replace=False) if deg else []
        if integer:
            ws = rng.integers(1, int(w_max), size=deg, endpoint=True).astype(float)
        else:
            ws = w_max * (1.0 - rng.random(deg))
        edges = sorted(((alive[int(i)], float(w)) for i, w in zip(us, ws)),
                       key=lambda p: -p[1])
        ops.append(InsertV(str(next_label), tuple(edges)))
        next_label += 1
    return OpsScript(tuple(ops))
