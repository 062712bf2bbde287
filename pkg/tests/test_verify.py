import math

import pytest

from multauction.auction import prepare, solve
from multauction.graph import BipartiteGraph, Matching, gen_random
from multauction.oracle import hungarian_exact
from multauction.verify import (INVARIANT_CHECKS, approx_ratio, check_alternating_paths,
                                check_dual_feasibility, check_invariant_1, check_invariant_2,
                                check_invariant_3, check_invariant_4, classify_component,
                                rounded_graph, verify_state)

from conftest import random_instances


def solved(g, eps_prime=0.2):
    return solve(g, eps_prime)[1]


@pytest.fixture
def pair_state():
    # One buyer, goods of weight 10 and 9: the buyer takes u0.
    g = BipartiteGraph.from_edges(2, 1, [(0, 0, 10.0), (1, 0, 9.0)])
    st = solved(g, 0.1)
    assert st.mate_v[0] == 0
    return st


@pytest.mark.parametrize("g", list(random_instances(60, seed=21)))
def test_all_checks_pass_after_solve(g):
    st = solved(g)
    m_star = hungarian_exact(rounded_graph(st)).matching
    before = st.snapshot()
    report = verify_state(st, m_star)
    assert st.snapshot() == before
    assert report.passed, report.render()
    # The dual certificate implies the rounded-weight guarantee.
    assert st.rounded_weight() >= (1 - 2 * st.cfg.eps) * m_star.total_weight * (1 - 1e-12)


def test_inv1_negative(pair_state):
    pair_state.y[1] = -pair_state.wt[1]
    r = check_invariant_1(pair_state)
    assert not r.passed and r.margin < 0 and r.witness == ("edge", 1, 0)


def test_inv2_negative(pair_state):
    pair_state.y[0] = 0.99 * pair_state.wt[0]
    r = check_invariant_2(pair_state)
    assert not r.passed and r.witness == ("competitor", 1, 0)


def test_inv3_negative(pair_state):
    pair_state.y[1] = 1.0
    assert check_invariant_3(pair_state).witness == ("unmatched_priced", 1)
    pair_state.y[1] = 0.0
    pair_state.y[0] = 0.0
    r = check_invariant_3(pair_state)
    assert not r.passed and r.witness == ("matched_unpriced", 0)


def test_inv4_negative(pair_state):
    # Unmatch the buyer by hand while its queue still holds pairs.
    st = pair_state
    st.mate_u[0] = -1
    st.mate_v[0] = -1
    st.y[0] = 0.0
    assert st.cursor[0] < st.q_end[0]
    r = check_invariant_4(st)
    assert not r.passed and r.witness[:2] == ("unmatched_with_queue", 0)


def test_dual_negative(pair_state):
    pair_state.y[1] = 0.5
    r = check_dual_feasibility(pair_state)
    assert not r.passed and r.witness == ("unmatched_u_dual", 1)


def test_dual_edge_negative(pair_state):
    # Buyer with a poor deal next to a much better unexplored edge.
    pair_state.y[0] = 0.9 * pair_state.wt[0]
    r = check_dual_feasibility(pair_state)
    assert not r.passed and r.witness == ("edge", 1, 0)


def test_paths_negative():
    g = BipartiteGraph.from_edges(2, 1, [(0, 0, 20.0), (1, 0, 100.0)])
    st = prepare(g, 0.5)
    e_light = next(e for e in range(st.m) if st.eu[e] == 0)
    st.mate_u[0], st.mate_v[0] = e_light, e_light
    r = check_alternating_paths(st, Matching.from_pairs(g, [(1, 0)]))
    assert not r.passed and r.witness[0] == "2a"


def test_paths_rejects_bad_m_star(pair_state):
    with pytest.raises(ValueError):
        check_alternating_paths(pair_state, [(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        check_alternating_paths(pair_state, [(0, 5)])


def test_paths_identical_matching(pair_state):
    r = check_alternating_paths(pair_state, [(0, 0)])
    assert r.passed and r.details["cases"] == {}


def U(i):
    return ("u", i)


def V(i):
    return ("v", i)


def test_classify_component():
    assert classify_component(True, [(U(0), V(0), True), (V(0), U(1), False)]) == "1"
    # U - V - U with M* first, M last.
    assert classify_component(False, [(U(0), V(0), False), (V(0), U(1), True)]) == "2a"
    # both ends in M*: V - U - V - U ... ends on M* edges.
    assert classify_component(False, [(U(0), V(0), False), (V(0), U(1), True),
                                      (U(1), V(1), False)]) == "2b"
    assert classify_component(False, [(V(0), U(0), True), (U(0), V(1), False)]) == "2c"
    assert classify_component(False, [(U(0), V(0), True)]) == "2c"


def test_cases_observed_on_random_instances():
    seen = set()
    for g in random_instances(150, seed=5, max_u=10, max_v=10):
        st = solved(g, 0.5)
        r = check_alternating_paths(st, hungarian_exact(rounded_graph(st)).matching)
        assert r.passed
        seen |= set(r.details["cases"])
    assert {"2a", "2c"} <= seen


def test_cycle_component():
    # A 4-cycle: M = {u0v0, u1v1}, M* = {u0v1, u1v0}.
    g = BipartiteGraph.from_edges(2, 2, [(0, 0, 10.0), (1, 1, 10.0), (0, 1, 9.0), (1, 0, 9.0)])
    st = solved(g, 0.2)
    assert {(st.eu[e], st.ev[e]) for e in st.matched_edges()} == {(0, 0), (1, 1)}
    r = check_alternating_paths(st, [(0, 1), (1, 0)])
    assert r.passed and r.details["cases"] == {"1": 1}


def test_report_rendering(pair_state):
    report = verify_state(pair_state)
    assert len(report.checks) == len(INVARIANT_CHECKS) + 1
    assert report["inv1"].passed
    assert all(line.startswith("PASS") for line in report.render().splitlines())
    assert set(report.to_dict()) == {"inv1", "inv2", "inv3", "inv4", "dual"}
    with pytest.raises(KeyError):
        report["nope"]


def test_approx_ratio_conventions():
    empty = Matching.empty()
    assert approx_ratio(empty, empty) == 1.0
    g = BipartiteGraph.from_edges(1, 1, [(0, 0, 2.0)])
    one = Matching.from_pairs(g, [(0, 0)])
    assert approx_ratio(empty, one) == 0.0
    assert approx_ratio(one, empty) == math.inf


def test_dynamic_deleted_vertices_are_ignored():
    from multauction.dynamic import DynamicMatcher
    g = gen_random(5, 5, 20, 10.0, seed=2)
    dm = DynamicMatcher(g, 0.2, w_cap=10.0)
    for u in (0, 2):
        dm.delete_u(u)
    st = dm.state
    report = verify_state(st, hungarian_exact(rounded_graph(st)).matching)
    assert report.passed, report.render()


@pytest.mark.parametrize("order", [[0, 1], [1, 0]])
def test_augmenting_path_component(order):
    # u0-v0 (2), v0-u1 (10), u1-v1 (9): the buyer on u1 keeps it while the
    # optimum splits the path, leaving a path whose end edges are both in M*.
    g = BipartiteGraph.from_edges(2, 2, [(0, 0, 2.0), (1, 0, 10.0), (1, 1, 9.0)])
    st = solve(g, 0.5, order=order)[1]
    r = check_alternating_paths(st, hungarian_exact(rounded_graph(st)).matching)
    assert r.passed and r.details["cases"] == {"2b": 1}


def test_deleted_good_keeps_stale_price():
    from multauction.dynamic import DynamicMatcher
    g = BipartiteGraph.from_edges(2, 1, [(0, 0, 10.0), (1, 0, 9.0)])
    dm = DynamicMatcher(g, 0.2, w_cap=10.0)
    dm.delete_u(0)
    st = dm.state
    assert st.y[0] > 0 and st.mate_u[0] == -1
    assert check_invariant_3(st).passed and check_dual_feasibility(st).passed


def test_surplus_buyer_dual_branch():
    # Two buyers, one good: the loser's queue is exhausted and y_u >= (1-eps) w.
    g = BipartiteGraph.from_edges(1, 2, [(0, 0, 3.0), (0, 1, 3.0)])
    st = solve(g, 0.5, eps=0.25)[1]
    loser = 0 if st.mate_v[0] < 0 else 1
    assert st.touched[loser] and st.cursor[loser] == st.q_end[loser]
    assert st.y[0] >= (1 - st.cfg.eps) * st.wt[0]
    assert check_dual_feasibility(st).passed


def test_dual_on_50x50():
    st = solved(gen_random(50, 50, 1200, 1e4, seed=50), 0.1)
    r = check_dual_feasibility(st)
    assert r.passed and r.margin >= 0


def test_paths_on_30x30_integer():
    st = solved(gen_random(30, 30, 400, 100, seed=30, integer=True), 0.2)
    r = check_alternating_paths(st, hungarian_exact(rounded_graph(st)).matching)
    assert r.passed


def test_two_by_two_path_case(two_by_two):
    st = solved(two_by_two, 0.2)
    m_star = hungarian_exact(rounded_graph(st)).matching
    r = check_alternating_paths(st, m_star)
    assert r.passed
    mine = {(st.eu[e], st.ev[e]) for e in st.matched_edges()}
    # The auction keeps u0v0 (10); the optimum ties with u0v1 + u1v0 (9 + 1).
    # The difference is the odd path v1-u0-v0-u1 whose end edges are in M*.
    assert mine == {(0, 0)} and m_star.pairs == {(0, 1), (1, 0)}
    assert r.details["cases"] == {"2b": 1}
