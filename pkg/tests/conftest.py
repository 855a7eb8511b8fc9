import os
import sys

import pytest

from egoclique.graph import Graph

sys.path.insert(0, os.path.dirname(__file__))

G6_EDGES = [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (3, 4)]
G6_SEX = {1: "F", 2: "F", 5: "F", 6: "F", 3: "M", 4: "M"}
PENDANT_EDGES = G6_EDGES + [(1, 7)]
K4_EDGES = [(a, b) for a in range(1, 5) for b in range(a + 1, 5)]
STAR_EDGES = [(0, 1), (0, 2), (0, 3)]
# 8 nodes, two categories: a K4, a triangle sharing node 4, a pendant path and an isolated pair
ATTR8_EDGES = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (4, 5), (4, 6), (5, 6), (6, 7), (7, 8)]
ATTR8_CATS = {1: "a", 2: "b", 3: "a", 4: "b", 5: "b", 6: "a", 7: "a", 8: "b"}
# two maximal 3-cliques and two maximal 4-cliques, containing {1,2,5} and {6,7,8,9}
TRI_K4_EDGES = ([(1, 2), (1, 5), (2, 5), (2, 3), (2, 4), (3, 4)]
              + [(a, b) for a in (6, 7, 8, 9) for b in (6, 7, 8, 9) if a < b]
              + [(a, b) for a in (4, 10, 11, 12) for b in (4, 10, 11, 12) if a < b])


@pytest.fixture
def g6():
    return Graph.from_edges(G6_EDGES)


@pytest.fixture
def g6_attr():
    return Graph.from_edges(G6_EDGES, attributes=G6_SEX)


@pytest.fixture
def g6_pendant():
    return Graph.from_edges(PENDANT_EDGES)


def dense(g, *ids):
    return [g.dense_id(v) for v in ids]


# acceptance criteria bookkeeping: one PASS/FAIL line per criterion at the end of the run

_RANK = {"PASS": 0, "NOT RUN": 1, "FAIL": 2}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    rep = (yield).get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed or rep.skipped):
        return
    status = "FAIL" if rep.failed else "NOT RUN" if rep.skipped else "PASS"
    details = [v for k, v in item.user_properties if k == "detail"]
    if rep.skipped and isinstance(rep.longrepr, tuple):
        details.append(rep.longrepr[2].removeprefix("Skipped: "))
    old, old_details = item.config._criteria.get(marker.args, ("PASS", []))
    if _RANK[status] < _RANK[old]:
        status = old
    item.config._criteria[marker.args] = (status, old_details + details)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not config._criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), (status, details) in sorted(config._criteria.items()):
        terminalreporter.write_line(f"criterion {number} [{status}] {title}")
        for d in dict.fromkeys(details):
            terminalreporter.write_line(f"    {d}")
