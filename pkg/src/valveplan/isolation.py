"""Exact semantics of valve closure.

Water flows along pipes and through junctions; a slot that holds a valve
blocks flow between its pipe and its node only while that valve is closed.
Repairing a pipe means closing the *boundary valves* of the pipe's sector:
the valves reached by walking out from the pipe over the node/pipe incidence
structure without ever crossing a valve slot. Sectors therefore partition
the pipes, and every pipe of a sector entails the same closure.

Closing a boundary set can cut off pipes far outside the sector as well
(every path from the sources crosses a closed valve). The *undelivered
demand* of a break is the total demand of all pipes without a source path
once the boundary is closed; the solver minimizes the worst case of this
over all single-pipe breaks.

All functions here are pure with respect to (network, placement); a
placement is any iterable of present slot ids. Flows are integer ml/s.
"""

import math
from dataclasses import dataclass

INFEASIBLE_UD = math.inf


@dataclass(frozen=True)
class Sector:
    """One maximal valve-free region: its pipes, interior nodes, and the
    boundary slots whose valves isolate it."""
    edges: frozenset
    interior_nodes: frozenset
    boundary: frozenset
    demand: int
    contains_source: bool


@dataclass(frozen=True)
class SectorPartition:
    sectors: tuple
    edge_sector: tuple  # edge index -> position in `sectors`

    def sector_of_edge(self, edge):
        return self.sectors[self.edge_sector[edge]]


@dataclass(frozen=True)
class BreakOutcome:
    edge: int
    closed: frozenset            # slot ids closed to de-water the pipe
    dewatered: frozenset         # edge ids left without water
    ud: int                      # undelivered demand, ml/s
    feasible: bool               # the broken pipe itself is de-watered


@dataclass(frozen=True)
class WorstCase:
    ud: int          # ml/s; INFEASIBLE_UD when some pipe cannot be isolated
    edge: int        # a worst break (lowest edge id among maximizers), or None
    feasible: bool


def present_mask(net, placement):
    mask = 0
    for slot in placement:
        if not 0 <= slot < net.num_slots:
            raise ValueError(f"slot {slot} out of range")
        mask |= 1 << slot
    return mask


# -- fast mask-based core (shared by the solver and the brute-force oracle) ---

def sector_from(net, present, edge):
    """Flood out from `edge` without crossing valves.

    Returns (edges_mask, boundary_slot_mask, interior_node_mask, demand,
    contains_source).
    """
    inc = net._inc
    ep = net.endpoints
    w = net.demand
    smask = net.sources_mask
    edges_mask = 1 << edge
    boundary = 0
    nodes_mask = 0
    demand = w[edge]
    has_source = False
    stack = [edge]
    while stack:
        f = stack.pop()
        base = 2 * f
        for slot, node in ((base, ep[f][0]), (base + 1, ep[f][1])):
            if present >> slot & 1:
                boundary |= 1 << slot
                continue
            if nodes_mask >> node & 1:
                continue
            nodes_mask |= 1 << node
            if smask >> node & 1:
                has_source = True
            for g, slot_here, _, _ in inc[node]:
                if present >> slot_here & 1:
                    boundary |= 1 << slot_here
                elif not (edges_mask >> g & 1):
                    edges_mask |= 1 << g
                    demand += w[g]
                    stack.append(g)
    return edges_mask, boundary, nodes_mask, demand, has_source


def delivered_with_closed(net, closed):
    """Edges still fed from some source while the slots in `closed` block.

    Returns (delivered_edges_mask, delivered_demand).
    """
    inc = net._inc
    delivered = 0
    demand = 0
    node_seen = 0
    stack = []
    for s in net.source_list:
        node_seen |= 1 << s
        stack.append(s)
    while stack:
        node = stack.pop()
        for g, slot_here, other, slot_other in inc[node]:
            if closed >> slot_here & 1:
                continue
            if not (delivered >> g & 1):
                delivered |= 1 << g
                demand += net.demand[g]
            if not (node_seen >> other & 1) and not (closed >> slot_other & 1):
                node_seen |= 1 << other
                stack.append(other)
    return delivered, demand


def scan_sectors(net, present):
    """Yield (representative_edge, edges_mask, boundary, nodes_mask, demand,
    contains_source) for every sector; representatives ascend."""
    seen = 0
    for e in range(net.num_edges):
        if seen >> e & 1:
            continue
        res = sector_from(net, present, e)
        seen |= res[0]
        yield (e,) + res


def worst_case_fast(net, present):
    """(ud, argmax_edge, feasible) over all single-pipe breaks, mask input.

    Edges of a sector share one outcome, so one break per sector is
    evaluated. A sector with an interior source cannot be de-watered at all;
    such placements report INFEASIBLE_UD.
    """
    best = -1
    best_edge = None
    total = net.total_demand
    for rep, _, boundary, _, _, has_source in scan_sectors(net, present):
        if has_source:
            return INFEASIBLE_UD, rep, False
        _, delivered = delivered_with_closed(net, boundary)
        ud = total - delivered
        if ud > best:
            best = ud
            best_edge = rep
    return best, best_edge, True


# -- rich public wrappers ------------------------------------------------------

def _bits(mask):
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def sector_of(net, placement, edge):
    """The sector containing `edge` under `placement`, as a Sector."""
    mask = present_mask(net, placement)
    edges_mask, boundary, nodes_mask, demand, has_source = sector_from(net, mask, edge)
    return Sector(frozenset(_bits(edges_mask)), frozenset(_bits(nodes_mask)),
                  frozenset(_bits(boundary)), demand, has_source)


def sectors(net, placement):
    """Partition of all edges into sectors."""
    mask = present_mask(net, placement)
    out = []
    edge_sector = [None] * net.num_edges
    for rep, edges_mask, boundary, nodes_mask, demand, has_source in scan_sectors(net, mask):
        pos = len(out)
        members = _bits(edges_mask)
        for e in members:
            edge_sector[e] = pos
        out.append(Sector(frozenset(members), frozenset(_bits(nodes_mask)),
                          frozenset(_bits(boundary)), demand, has_source))
    return SectorPartition(tuple(out), tuple(edge_sector))


def evaluate_break(net, placement, edge):
    """Outcome of breaking `edge`: closed valves, de-watered pipes, ud."""
    mask = present_mask(net, placement)
    _, boundary, _, _, _ = sector_from(net, mask, edge)
    delivered, delivered_w = delivered_with_closed(net, boundary)
    all_edges = (1 << net.num_edges) - 1
    dewatered = all_edges & ~delivered
    return BreakOutcome(edge=edge,
                        closed=frozenset(_bits(boundary)),
                        dewatered=frozenset(_bits(dewatered)),
                        ud=net.total_demand - delivered_w,
                        feasible=bool(dewatered >> edge & 1))


def worst_case_ud(net, placement):
    ud, edge, feasible = worst_case_fast(net, present_mask(net, placement))
    return WorstCase(ud=ud, edge=edge, feasible=feasible)


# -- independent formulation (verification path) ------------------------------

def ud_by_component_deletion(net, placement, edge):
    """Undelivered demand computed the subtraction way.

    Identify the broken pipe's sector by a naive fixpoint sweep, delete its
    pipes and interior nodes from the graph, take plain connected components
    of what remains (valves ignored entirely), and subtract the demand of
    the source-side components from the network total. Pipes that lost one
    endpoint with the sector hang off their surviving endpoint.

    Returns (feasible, ud) with ud None when the sector holds a source.
    Deliberately written against different machinery than the reachability
    path so the two can check each other.
    """
    present = set(placement)

    def open_slot(e, node):
        return net.slot_id(e, node) not in present

    member = {edge}
    interior = set()
    changed = True
    while changed:
        changed = False
        for k in range(net.num_nodes):
            if k in interior:
                continue
            for f in net.incident[k]:
                if f in member and open_slot(f, k):
                    interior.add(k)
                    changed = True
                    break
        for f in range(net.num_edges):
            if f in member:
                continue
            u, v = net.endpoints[f]
            if (u in interior and open_slot(f, u)) or (v in interior and open_slot(f, v)):
                member.add(f)
                changed = True

    if any(s in interior for s in net.source_list):
        return False, None

    surviving = [n for n in range(net.num_nodes) if n not in interior]
    comp = {n: None for n in surviving}
    n_comp = 0
    for start in surviving:
        if comp[start] is not None:
            continue
        comp[start] = n_comp
        queue = [start]
        while queue:
            a = queue.pop()
            for f in net.incident[a]:
                if f in member:
                    continue
                u, v = net.endpoints[f]
                b = v if a == u else u
                if b in comp and comp[b] is None:
                    comp[b] = n_comp
                    queue.append(b)
        n_comp += 1

    source_comps = {comp[s] for s in net.source_list}
    deliverable = 0
    for f in range(net.num_edges):
        if f in member:
            continue
        u, v = net.endpoints[f]
        ends = [n for n in (u, v) if n in comp]
        if any(comp[n] in source_comps for n in ends):
            deliverable += net.demand[f]
    return True, net.total_demand - deliverable
