import json

import pytest

from valveplan import instances
from valveplan.generate import random_instance
from valveplan.network import parse_network

# Regression corpus: 50 seeded random planar instances with 5..8 edges.
CORPUS_SEEDS = tuple(range(50))
CORPUS_NVS = (2, 3, 4, 5)


def make_net(nodes, sources, edges, **extra):
    """Shorthand builder: edges as (label, u, v, demand_lps)."""
    doc = {"nodes": nodes, "sources": sources,
           "edges": [list(e) for e in edges]}
    doc.update(extra)
    return parse_network(json.dumps(doc))


@pytest.fixture(scope="session")
def fig1():
    return instances.fig1()


@pytest.fixture(scope="session")
def fig2():
    return instances.fig2()


@pytest.fixture(scope="session")
def fig1_demo_placement(fig1):
    from valveplan.network import parse_placement
    return parse_placement(fig1, " ".join(instances.FIG1_SIX_VALVES))


@pytest.fixture(scope="session")
def corpus():
    return [random_instance(seed) for seed in CORPUS_SEEDS]


@pytest.fixture(scope="session")
def corpus_oracle(corpus):
    """Ground-truth optima for every (instance, n_valves) pair of the corpus.

    Value is math.inf when every placement of that size is infeasible.
    Computed once per session; several suites compare against it.
    """
    from valveplan.oracle import brute_force
    results = {}
    for idx, net in enumerate(corpus):
        for nv in CORPUS_NVS:
            results[(idx, nv)] = brute_force(net, nv)
    return results


@pytest.fixture(scope="session")
def triangle():
    return make_net([1, 2, 3], [1],
                    [("a", 1, 2, 4), ("b", 2, 3, 5), ("c", 1, 3, 6)])


@pytest.fixture(scope="session")
def source_path():
    """3-pipe path with a degree-2 source in the middle of one end."""
    return make_net([1, 2, 3, 4], [2],
                    [("a", 1, 2, 5), ("b", 2, 3, 1), ("c", 3, 4, 9)])
