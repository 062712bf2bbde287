"""Multiplicative auction algorithms for approximate maximum weight bipartite
matching, static and under one-sided vertex updates."""

from .auction import AuctionState, LevelBuckets, build_queues, match_r, solve
from .dynamic import DynamicMatcher, MatchingDelta, new_dynamic
from .graph import (BipartiteGraph, DeleteU, FormatError, InsertV, Matching,
                    OpsScript, gen_ops_script, gen_random, parse_graph,
                    parse_ops_script, write_graph, write_ops_script)
from .oracle import OracleResult, brute_force_exact, hungarian_exact
from .verify import VerificationReport, approx_ratio, verify_state
from .weights import (EpsilonConfig, ScaledGraph, compute_kmin, ilog, preprocess,
                      round_down)

__version__ = "0.1.0"
