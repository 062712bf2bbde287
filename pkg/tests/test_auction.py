import itertools
from fractions import Fraction

import numpy as np
import pytest

from multauction.auction import LevelBuckets, build_queues, match_r, prepare, solve
from multauction.graph import BipartiteGraph, Matching, gen_random
from multauction.oracle import brute_force_exact, hungarian_exact
from multauction.verify import approx_ratio
from multauction.weights import EpsilonConfig, preprocess

from conftest import random_instances


def scaled(g, eps_prime, eps=None):
    cfg = EpsilonConfig.for_instance(eps_prime, g.n, eps)
    return preprocess(g, cfg), cfg


def test_single_edge_queue():
    g = BipartiteGraph.from_edges(1, 1, [(0, 0, 5.0)])
    sg, cfg = scaled(g, 0.5, eps=0.5)
    assert cfg.k_min == 2
    st = build_queues(sg, cfg)
    j = cfg.k_max
    assert st.queue(0) == [(j, 0), (j - 1, 0), (j - 2, 0)]


def test_two_edges_interleave():
    # Levels 10 and 9 with k_min = 2, bucket pass by hand:
    # L10={a}, L9={a,b}, L8={a,b}, L7={b}.
    cfg = EpsilonConfig(0.5, 0.5, 50)
    lb = LevelBuckets.from_levels([10, 9], cfg)
    assert lb[10] == [0] and lb[9] == [0, 1] and lb[8] == [0, 1] and lb[7] == [1]
    assert lb.drain([0, 0], 1) == [[(10, 0), (9, 0), (9, 1), (8, 0), (8, 1), (7, 1)]]


def test_empty_graph():
    g = BipartiteGraph.from_edges(3, 2, [])
    m, st = solve(g, 0.2)
    assert m == Matching.empty()
    assert st.total_pairs == 0 and st.pops == 0


def test_all_zero_weights_give_empty_matching():
    g = BipartiteGraph.from_edges(1, 2, [(0, 0, 0.0), (0, 1, 0.0)])
    m, _ = solve(g, 0.2)
    assert len(m) == 0


@pytest.mark.parametrize("seed", range(5))
def test_bucket_and_radix_orders_agree(seed):
    g = gen_random(8, 12, 60, 1e3, seed=seed)
    sg, cfg = scaled(g, 0.3)
    a = build_queues(sg, cfg, method="bucket")
    b = build_queues(sg, cfg, method="radix")
    assert a.pair_level == b.pair_level and a.pair_edge == b.pair_edge
    assert a.q_start == b.q_start and a.q_end == b.q_end


@pytest.mark.parametrize("seed", range(5))
def test_queue_structure(seed):
    g = gen_random(10, 10, 70, 50.0, seed=seed)
    sg, cfg = scaled(g, 0.2)
    st = build_queues(sg, cfg)
    assert st.total_pairs == sg.m * (cfg.k_min + 1)
    for v in range(g.n_v):
        q = st.queue(v)
        levels = [i for i, _ in q]
        assert levels == sorted(levels, reverse=True)
        for e in st.adj_v[v]:
            mine = [i for i, f in q if f == e]
            assert mine == list(range(st.level[e], st.level[e] - cfg.k_min - 1, -1))
    assert all(y == 0 for y in st.y) and st.matched_edges() == []


def test_match_r_first_bid():
    g = BipartiteGraph.from_edges(1, 1, [(0, 0, 5.0)])
    st = prepare(g, 0.2)
    match_r(st, 0)
    w = st.wt[0]
    assert w == st.cfg.power(st.cfg.k_max)
    assert st.mate_v[0] == 0 and st.y[0] == st.cfg.eps * w
    assert st.pops == 1


def test_match_r_empty_queue():
    g = BipartiteGraph.from_edges(1, 2, [(0, 0, 5.0)])
    st = prepare(g, 0.2)
    match_r(st, 1)
    assert st.mate_v[1] == -1 and st.pops == 0 and st.touched[1]


def test_two_buyers_one_good_hand_simulated():
    # eps = 1/4, n = 3, eps' = 1/2: k_min = 7, k_max = 8, both edges at level 8.
    # Frozen from an exact rational transcription of the bidding procedure.
    g = BipartiteGraph.from_edges(1, 2, [(0, 0, 3.0), (0, 1, 3.0)])
    m, st = solve(g, 0.5, eps=0.25, trace=True)
    assert (st.cfg.k_min, st.cfg.k_max) == (7, 8)
    accepted = [(v, j) for v, j, _, ok, _, _ in st.trace if ok]
    assert accepted == [(0, 8), (1, 6), (0, 5), (1, 4), (0, 2), (1, 1)]
    w = Fraction(5, 4) ** 8
    assert Fraction(st.y[0]) == Fraction(3367, 4096) * w
    assert m.pairs == {(0, 1)}
    assert st.mate_v[0] == -1 and st.cursor[0] == st.q_end[0]


def test_single_edge_solve():
    g = BipartiteGraph.from_edges(1, 1, [(0, 0, 5.0)])
    m, _ = solve(g, 0.1)
    assert m.pairs == {(0, 0)} and m.total_weight == 5.0


def brute_matchings(g):
    edges = list(g.edges())
    best = 0.0
    for r in range(len(edges) + 1):
        for sub in itertools.combinations(edges, r):
            if len({u for u, _, _ in sub}) == r == len({v for _, v, _ in sub}):
                best = max(best, sum(w for _, _, w in sub))
    return best


def test_two_by_two_example(two_by_two):
    assert brute_matchings(two_by_two) == 10.0
    m, _ = solve(two_by_two, 0.2)
    assert m.total_weight >= 8.0


def test_random_200_vertices_against_hungarian():
    g = gen_random(100, 100, 2000, 1e6, seed=11)
    m, _ = solve(g, 0.1)
    assert approx_ratio(m, hungarian_exact(g).matching) >= 0.9


@pytest.mark.parametrize("g", list(random_instances(40, seed=3)))
def test_static_properties(g):
    m, st = solve(g, 0.2, trace=True)
    assert st.pops <= st.pop_bound() <= g.m * (st.cfg.k_min + 1)
    Matching.from_pairs(g, m.pairs)
    last_level = {}
    price = [0.0] * g.n_u
    for v, j, e, ok, before, after in st.trace:
        u = st.eu[e]
        assert before == price[u] and after >= before
        price[u] = after
        if v in last_level:
            assert j <= last_level[v]
        last_level[v] = j
    for e in st.matched_edges():
        assert st.util(e) > 0
    assert approx_ratio(m, brute_force_exact(g).matching) >= 0.8


@pytest.mark.parametrize("seed", range(10))
def test_order_independence(seed):
    g = gen_random(10, 15, 80, 100.0, seed=seed)
    opt = brute_force_exact(g).optimal_weight
    order = np.random.default_rng(seed).permutation(g.n_v).tolist()
    for o in (None, order, order[::-1]):
        m, st = solve(g, 0.2, order=o)
        assert m.total_weight >= 0.8 * opt
        assert st.pops <= st.pop_bound()
