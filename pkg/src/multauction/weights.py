"""Weight preprocessing: small-edge filtering, rescaling and rounding down to
powers of (1 + eps).

Every power of (1 + eps) used anywhere in the package comes from one
multiplication chain (upwards from 1.0 by repeated multiplication, downwards
by repeated division).  ``ilog`` walks that same chain, so the sandwich
``round_down(x) <= x < (1 + eps) * round_down(x)`` holds exactly with respect
to the table, including at power boundaries.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .graph import BipartiteGraph

#: Internal eps as a fraction of the target slack eps_prime.
DEFAULT_EPS_FRACTION = 0.25


def ilog(x: float, eps: float) -> int:
    """floor(log_{1+eps} x), computed by walking the power chain."""
    if not x > 0:
        raise ValueError(f"ilog needs x > 0, got {x}")
    if not eps > 0:
        raise ValueError(f"ilog needs eps > 0, got {eps}")
    base = 1.0 + eps
    p, i = 1.0, 0
    if x >= 1.0:
        while p * base <= x:
            p *= base
            i += 1
    else:
        while p > x:
            p /= base
            i -= 1
    return i


def _power(i: int, eps: float) -> float:
    base = 1.0 + eps
    p = 1.0
    for _ in range(abs(i)):
        p = p * base if i > 0 else p / base
    return p


def round_down(x: float, eps: float) -> float:
    """Largest power of (1 + eps) that is <= x."""
    return _power(ilog(x, eps), eps)


def compute_kmin(eps: float) -> int:
    """Smallest k >= 0 with (1 + eps)**-k <= eps."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    base = 1.0 + eps
    p, k = 1.0, 0
    while p > eps:
        p /= base
        k += 1
    return k


@dataclass(frozen=True)
class EpsilonConfig:
    """Approximation parameters and the power table for one solve.

    ``power_table[i + k_min] == (1 + eps)**i`` for ``-k_min <= i <= k_max + 1``.
    """

    eps_prime: float
    eps: float
    n: int
    k_min: int = field(init=False)
    k_max: int = field(init=False)
    power_table: tuple[float, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0 < self.eps_prime < 1:
            raise ValueError(f"eps_prime must lie in (0, 1), got {self.eps_prime}")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        k_min = compute_kmin(self.eps)
        k_max = ilog(self.n / self.eps_prime, self.eps)
        base = 1.0 + self.eps
        down = [1.0]
        for _ in range(k_min):
            down.append(down[-1] / base)
        up = [1.0]
        for _ in range(k_max + 1):
            up.append(up[-1] * base)
        object.__setattr__(self, "k_min", k_min)
        object.__setattr__(self, "k_max", k_max)
        object.__setattr__(self, "power_table", tuple(down[:0:-1] + up))

    @classmethod
    def for_instance(cls, eps_prime: float, n: int,
                     eps: float | None = None) -> EpsilonConfig:
        if eps is None:
            eps = DEFAULT_EPS_FRACTION * eps_prime
        return cls(eps_prime, eps, max(int(n), 1))

    def power(self, i: int) -> float:
        if not -self.k_min <= i <= self.k_max + 1:
            raise IndexError(f"level {i} outside [{-self.k_min}, {self.k_max + 1}]")
        return self.power_table[i + self.k_min]

    def ilog(self, x: float) -> int:
        """Table lookup equivalent of ``ilog(x, eps)`` for x in table range."""
        i = bisect_right(self.power_table, x) - 1
        if i < 0 or i == len(self.power_table) - 1:
            return ilog(x, self.eps)
        return i - self.k_min

    def round_down(self, x: float) -> float:
        i = self.ilog(x)
        if -self.k_min <= i <= self.k_max + 1:
            return self.power(i)
        return _power(i, self.eps)

    def table_array(self) -> np.ndarray:
        return np.array(self.power_table)


@dataclass(frozen=True, eq=False)
class ScaledGraph:
    """Surviving edges of ``base`` with rescaled, rounded weights.

    ``kept[k]`` is the base edge index of the k-th surviving edge, which has
    level ``level[k]`` and rounded weight ``wt[k] == cfg.power(level[k])``.
    """

    base: BipartiteGraph
    cfg: EpsilonConfig
    scale: float
    kept: np.ndarray
    level: np.ndarray
    wt: np.ndarray
    dropped_count: int

    @property
    def m(self) -> int:
        return len(self.kept)

    def as_graph(self) -> BipartiteGraph:
        """Kept edges with rounded weights, as a standalone graph."""
        return BipartiteGraph(self.base.n_u, self.base.n_v, self.base.eu[self.kept],
                              self.base.ev[self.kept], self.wt)


def scale_levels(w: np.ndarray, scale: float, cfg: EpsilonConfig
                 ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Filter, rescale and round ``w`` against a fixed ``scale``.

    Returns (mask of kept entries, levels, rounded weights).  Weights whose
    rescaled value would exceed the top table level are clamped to ``k_max``.
    """
    w = np.asarray(w, dtype=float)
    keep = (w >= scale) & (w > 0)
    x = w[keep] / scale
    table = cfg.table_array()
    idx = np.searchsorted(table, x, side="right") - 1
    idx = np.minimum(idx, cfg.k_max + cfg.k_min)
    return keep, idx - cfg.k_min, table[idx]


def preprocess(g: BipartiteGraph, cfg: EpsilonConfig) -> ScaledGraph:
    """Drop edges lighter than eps'*w_max/n, divide the rest by that threshold
    and round down to powers of (1 + eps)."""
    if g.m == 0 or not g.ew.max() > 0:
        raise ValueError("graph has no positive-weight edge")
    w_max = float(g.ew.max())
    scale = cfg.eps_prime * w_max / cfg.n
    keep, level, wt = scale_levels(g.ew, scale, cfg)
    kept = np.flatnonzero(keep)
    return ScaledGraph(g, cfg, scale, kept, level, wt, g.m - len(kept))
