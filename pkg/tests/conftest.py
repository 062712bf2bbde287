import numpy as np
import pytest

from multauction.graph import BipartiteGraph, gen_random


@pytest.fixture
def two_by_two():
    """w(u1v1)=10, w(u1v2)=9, w(u2v1)=1 (0-based: u0v0, u0v1, u1v0)."""
    return BipartiteGraph.from_edges(2, 2, [(0, 0, 10.0), (0, 1, 9.0), (1, 0, 1.0)])


def random_instances(count, seed, max_u=12, max_v=30, integer=None, w_max=1e6):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n_u = int(rng.integers(1, max_u + 1))
        n_v = int(rng.integers(1, max_v + 1))
        m = int(rng.integers(0, n_u * n_v + 1))
        as_int = bool(i % 2) if integer is None else integer
        yield gen_random(n_u, n_v, m, w_max, seed=int(rng.integers(2**31)), integer=as_int)


# -- acceptance criterion reporting --------------------------------------------

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, {"title": title, "passed": True, "ran": False})
    if rep.when == "call":
        entry["ran"] = True
    if rep.failed:
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        c = _criteria[number]
        status = "PASS" if c["passed"] and c["ran"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {c['title']}")
