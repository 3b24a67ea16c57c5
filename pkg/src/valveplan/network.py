"""Water distribution network model: instance documents, validation, faces.

A network is a weighted undirected graph. Nodes are junctions, a nonempty
subset of them are *sources* (where water enters), and every edge is a pipe
carrying a nonnegative *demand* in litres per second (the aggregate draw of
the users attached to that pipe).

Valve positions are addressed by *slots*: each pipe has one possible valve
position at each of its two endpoints, so a network with ``m`` pipes has
``2*m`` slots. Slot ``2*e`` sits at the first declared endpoint of edge
``e`` and slot ``2*e + 1`` at the second. A *placement* is the set of slots
that actually hold a valve.

Demands are stored internally as integer millilitres per second so every
comparison made by the optimizer is exact; the document format accepts
decimals with up to three fractional digits.

Instance documents are JSON objects::

    {
      "nodes":   [1, 2, 3],
      "sources": [1],
      "edges":   [["a", 1, 2, 4.5], ["b", 2, 3, 10]],
      "faces":   [[1, 2, 3]],              // optional
      "coords":  {"1": [0, 0], "2": [1, 0], "3": [0.5, 1]}   // optional
    }

Each edge is ``[label, endpoint, endpoint, demand_lps]``. When ``faces``
is omitted but ``coords`` is present, the internal faces of the straight
line drawing are computed automatically; if neither is usable the face
information is simply absent (it only feeds an optional pruning rule).
"""

import json
import math

MLS = 1000  # internal flow unit: millilitres per second


class InstanceError(ValueError):
    """Problem with an instance document."""


class ParseError(InstanceError):
    """Document is not syntactically well formed."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(InstanceError):
    """Document parsed but violates a model invariant."""


class PlanarityError(ValidationError):
    """Straight-line drawing is not a plane embedding."""


def flow_from_lps(value, where="demand"):
    """Convert a document flow (l/s, up to 3 fractional digits) to int ml/s."""
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{where}: flow must be a number")
    if not math.isfinite(value):
        raise ValidationError(f"{where}: flow must be finite")
    mls = round(value * MLS)
    if abs(value * MLS - mls) > 1e-6:
        raise ValidationError(f"{where}: flow has more than 3 fractional digits")
    if mls < 0:
        raise ValidationError(f"{where}: flow must be >= 0")
    return mls


def format_flow(mls):
    """Render an internal ml/s figure in l/s, trimming trailing zeros."""
    if mls == math.inf:
        return "inf"
    mls = int(mls)
    sign = "-" if mls < 0 else ""
    q, r = divmod(abs(mls), MLS)
    if r == 0:
        return f"{sign}{q}"
    return f"{sign}{q}." + f"{r:03d}".rstrip("0")


class Network:
    """Validated, immutable network.

    Instances are safe to share across threads; nothing mutates them after
    construction. Build through :func:`parse_network` (document text) or the
    constructor (already-converted values, demands in ml/s).
    """

    def __init__(self, nodes, sources, edges, faces=None, coords=None, name=None):
        self.name = name
        self._init_nodes(nodes, sources)
        self._init_edges(edges)
        self._check_reachable()
        self._init_coords(coords)
        self._init_faces(faces)

    # -- construction ------------------------------------------------------

    def _init_nodes(self, nodes, sources):
        if not nodes:
            raise ValidationError("network has no nodes")
        self.node_labels = tuple(nodes)
        self.node_index = {}
        self._node_by_str = {}
        for i, label in enumerate(self.node_labels):
            if label in self.node_index or str(label) in self._node_by_str:
                raise ValidationError(f"duplicate node id {label!r}")
            self.node_index[label] = i
            self._node_by_str[str(label)] = i
        if not sources:
            raise ValidationError("at least one source node is required")
        src = set()
        for label in sources:
            if label not in self.node_index:
                raise ValidationError(f"source {label!r} is not a declared node")
            src.add(self.node_index[label])
        self.sources = frozenset(src)
        self.source_list = tuple(sorted(src))
        self.sources_mask = sum(1 << s for s in src)

    def _init_edges(self, edges):
        self.edge_labels = []
        self.edge_index = {}
        self._edge_by_str = {}
        self.endpoints = []
        self.demand = []
        seen_pairs = {}
        for k, (label, u_label, v_label, w) in enumerate(edges):
            if label in self.edge_index or str(label) in self._edge_by_str:
                raise ValidationError(f"duplicate edge id {label!r}")
            for end in (u_label, v_label):
                if end not in self.node_index:
                    raise ValidationError(f"edge {label!r}: endpoint {end!r} is not a declared node")
            u = self.node_index[u_label]
            v = self.node_index[v_label]
            if u == v:
                raise ValidationError(f"edge {label!r}: self-loops are not allowed")
            pair = (min(u, v), max(u, v))
            if pair in seen_pairs:
                raise ValidationError(
                    f"edges {seen_pairs[pair]!r} and {label!r} connect the same node pair "
                    "(parallel pipes are not supported)")
            seen_pairs[pair] = label
            if not isinstance(w, int) or isinstance(w, bool) or w < 0:
                raise ValidationError(f"edge {label!r}: internal demand must be a nonnegative integer")
            self.edge_index[label] = k
            self._edge_by_str[str(label)] = k
            self.edge_labels.append(label)
            self.endpoints.append((u, v))
            self.demand.append(w)
        self.edge_labels = tuple(self.edge_labels)
        self.endpoints = tuple(self.endpoints)
        self.demand = tuple(self.demand)
        self.total_demand = sum(self.demand)
        self._pair_edge = {pair: self.edge_index[lbl] for pair, lbl in seen_pairs.items()}

        incident = [[] for _ in self.node_labels]
        for e, (u, v) in enumerate(self.endpoints):
            incident[u].append(e)
            incident[v].append(e)
        self.incident = tuple(tuple(es) for es in incident)
        # per node: (edge, slot at this node, other endpoint, slot at other endpoint)
        inc = []
        for n, es in enumerate(self.incident):
            rows = []
            for e in es:
                u, v = self.endpoints[e]
                if n == u:
                    rows.append((e, 2 * e, v, 2 * e + 1))
                else:
                    rows.append((e, 2 * e + 1, u, 2 * e))
            inc.append(tuple(rows))
        self._inc = tuple(inc)

    def _check_reachable(self):
        if not self.endpoints:
            return
        seen = set(self.sources)
        stack = list(self.sources)
        while stack:
            n = stack.pop()
            for e, _, other, _ in self._inc[n]:
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        for e, (u, v) in enumerate(self.endpoints):
            if u not in seen:
                raise ValidationError(
                    f"edge {self.edge_labels[e]!r} is not reachable from any source")

    def _init_coords(self, coords):
        if coords is None:
            self.coords = None
            return
        out = {}
        for label, xy in coords.items():
            key = str(label)
            if key not in self._node_by_str:
                raise ValidationError(f"coords: unknown node {label!r}")
            if (not isinstance(xy, (list, tuple)) or len(xy) != 2
                    or not all(isinstance(c, (int, float)) and math.isfinite(c) for c in xy)):
                raise ValidationError(f"coords for node {label!r} must be a finite [x, y] pair")
            out[self._node_by_str[key]] = (float(xy[0]), float(xy[1]))
        if len(out) != self.num_nodes:
            raise ValidationError("coords must cover every node")
        self.coords = out

    def _init_faces(self, faces):
        if faces is not None:
            cycles = []
            for cycle in faces:
                if len(cycle) < 3:
                    raise ValidationError(f"face {cycle!r} has fewer than 3 nodes")
                idx = []
                for label in cycle:
                    if label not in self.node_index:
                        raise ValidationError(f"face {cycle!r}: unknown node {label!r}")
                    idx.append(self.node_index[label])
                for a, b in zip(idx, idx[1:] + idx[:1]):
                    if (min(a, b), max(a, b)) not in self._pair_edge:
                        raise ValidationError(
                            f"face {cycle!r}: consecutive nodes "
                            f"{self.node_labels[a]!r}, {self.node_labels[b]!r} are not an edge")
                cycles.append(_canonical_cycle(idx))
            self.faces = tuple(cycles)
            self.faces_declared = True
            return
        self.faces_declared = False
        if self.coords is None:
            self.faces = None
            return
        try:
            self.faces = tuple(_trace_internal_faces(self))
        except PlanarityError:
            # faces only feed an optional pruning rule; a bad drawing just loses it
            self.faces = None

    # -- basic queries -----------------------------------------------------

    @property
    def num_nodes(self):
        return len(self.node_labels)

    @property
    def num_edges(self):
        return len(self.endpoints)

    @property
    def num_slots(self):
        return 2 * len(self.endpoints)

    def degree(self, node):
        return len(self.incident[node])

    def edge_between(self, a, b):
        """Edge index connecting node indices a and b, or None."""
        return self._pair_edge.get((min(a, b), max(a, b)))

    # -- slots ---------------------------------------------------------------

    def slot_id(self, edge, node):
        """Slot index of the valve position on `edge` next to `node`."""
        u, v = self.endpoints[edge]
        if node == u:
            return 2 * edge
        if node == v:
            return 2 * edge + 1
        raise ValueError(f"node {node} is not an endpoint of edge {edge}")

    def slot_edge(self, slot):
        return slot >> 1

    def slot_node(self, slot):
        """Node index the slot sits next to."""
        return self.endpoints[slot >> 1][slot & 1]

    def slot_other_node(self, slot):
        return self.endpoints[slot >> 1][1 - (slot & 1)]

    def slot_token(self, slot):
        """Human-readable slot name, `edge_label:node_label`."""
        e = slot >> 1
        return f"{self.edge_labels[e]}:{self.node_labels[self.slot_node(slot)]}"

    def parse_slot_token(self, token):
        token = token.strip()
        if ":" not in token:
            raise ValidationError(f"bad slot token {token!r}, expected edge:node")
        edge_s, node_s = token.rsplit(":", 1)
        if edge_s not in self._edge_by_str:
            raise ValidationError(f"slot token {token!r}: unknown edge {edge_s!r}")
        if node_s not in self._node_by_str:
            raise ValidationError(f"slot token {token!r}: unknown node {node_s!r}")
        e = self._edge_by_str[edge_s]
        n = self._node_by_str[node_s]
        try:
            return self.slot_id(e, n)
        except ValueError:
            raise ValidationError(
                f"slot token {token!r}: node {node_s!r} is not an endpoint of edge {edge_s!r}")

    def placement_tokens(self, placement):
        return [self.slot_token(s) for s in sorted(placement)]

    # -- equality (semantic content) ----------------------------------------

    def _content(self):
        return (self.node_labels,
                frozenset(self.node_labels[s] for s in self.sources),
                tuple((lbl, self.node_labels[u], self.node_labels[v], w)
                      for lbl, (u, v), w in zip(self.edge_labels, self.endpoints, self.demand)),
                self.faces,
                None if self.coords is None else tuple(sorted(self.coords.items())))

    def __eq__(self, other):
        return isinstance(other, Network) and self._content() == other._content()

    def __hash__(self):
        return hash(self._content()[:3])

    def __repr__(self):
        name = f" {self.name!r}" if self.name else ""
        return (f"<Network{name}: {self.num_nodes} nodes, {self.num_edges} edges, "
                f"{len(self.sources)} source(s), total demand {format_flow(self.total_demand)} l/s>")


def _canonical_cycle(idx):
    """Rotate/orient a node-index cycle into a deterministic representative."""
    k = idx.index(min(idx))
    fwd = tuple(idx[k:] + idx[:k])
    rev = (fwd[0],) + tuple(reversed(fwd[1:]))
    return min(fwd, rev)


# -- document parsing ---------------------------------------------------------

_KNOWN_KEYS = {"nodes", "sources", "edges", "faces", "coords", "name", "comment"}


def parse_network(text):
    """Parse and validate an instance document. Returns a Network.

    Raises ParseError (with line/column) for malformed text and
    ValidationError naming the violated invariant otherwise.
    """
    def _bad_const(name):
        raise ParseError(f"non-finite number {name} is not allowed")

    try:
        doc = json.loads(text, parse_constant=_bad_const)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be a JSON object")
    unknown = set(doc) - _KNOWN_KEYS
    if unknown:
        raise ValidationError(f"unknown document keys: {sorted(unknown)}")
    for key in ("nodes", "sources", "edges"):
        if key not in doc:
            raise ValidationError(f"missing required key {key!r}")
        if not isinstance(doc[key], list):
            raise ValidationError(f"{key!r} must be an array")

    edges = []
    for entry in doc["edges"]:
        if not isinstance(entry, list) or len(entry) != 4:
            raise ValidationError(f"edge entry {entry!r} must be [id, node, node, demand]")
        label, u, v, w = entry
        edges.append((label, u, v, flow_from_lps(w, where=f"edge {label!r}")))

    faces = doc.get("faces")
    if faces is not None and not isinstance(faces, list):
        raise ValidationError("'faces' must be an array of node cycles")
    coords = doc.get("coords")
    if coords is not None and not isinstance(coords, dict):
        raise ValidationError("'coords' must be an object mapping node to [x, y]")

    return Network(doc["nodes"], doc["sources"], edges,
                   faces=faces, coords=coords, name=doc.get("name"))


def serialize_network(net):
    """Canonical document text for a network (parse round-trips it)."""
    doc = {}
    if net.name:
        doc["name"] = net.name
    doc["nodes"] = list(net.node_labels)
    doc["sources"] = sorted((net.node_labels[s] for s in net.sources), key=str)
    doc["edges"] = []
    for lbl, (u, v), w in zip(net.edge_labels, net.endpoints, net.demand):
        q, r = divmod(w, MLS)
        doc["edges"].append([lbl, net.node_labels[u], net.node_labels[v],
                             q if r == 0 else round(w / MLS, 3)])
    if net.faces is not None and net.faces_declared:
        doc["faces"] = [[net.node_labels[n] for n in cycle] for cycle in net.faces]
    if net.coords is not None:
        doc["coords"] = {str(net.node_labels[n]): list(xy)
                         for n, xy in sorted(net.coords.items())}
    return json.dumps(doc, indent=2)


def load_instance(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network(fh.read())


def parse_placement(net, text):
    """Placement file: whitespace-separated edge:node tokens, # comments."""
    slots = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for token in line.split():
            slot = net.parse_slot_token(token)
            if slot in slots:
                raise ValidationError(f"slot {token!r} listed twice")
            slots.add(slot)
    return frozenset(slots)


# -- planar faces -------------------------------------------------------------

def compute_faces(net):
    """Boundary cycles of the internal faces of the straight-line drawing.

    Requires coordinates for every node. The rotation system is obtained by
    sorting each node's incident edges by angle; the unbounded outer face is
    excluded. Cycles come back as canonicalized node-label tuples.
    """
    cycles = _trace_internal_faces(net)
    return [tuple(net.node_labels[n] for n in cycle) for cycle in cycles]


def _trace_internal_faces(net):
    if net.coords is None:
        raise ValidationError("face computation requires node coordinates")
    if net.num_edges == 0:
        return []
    pos = net.coords
    _check_no_crossings(net)

    rotation = {}
    for n in range(net.num_nodes):
        nbrs = [other for _, _, other, _ in net._inc[n]]
        nbrs.sort(key=lambda o: math.atan2(pos[o][1] - pos[n][1], pos[o][0] - pos[n][0]))
        rotation[n] = nbrs

    # next dart after arriving at v from u: the rotation successor of u at v
    unused = {(u, v) for u, v in net.endpoints} | {(v, u) for u, v in net.endpoints}
    walks = []
    while unused:
        start = min(unused)
        walk = [start]
        unused.discard(start)
        while True:
            u, v = walk[-1]
            ring = rotation[v]
            w = ring[(ring.index(u) + 1) % len(ring)]
            dart = (v, w)
            if dart == start:
                break
            walk.append(dart)
            unused.discard(dart)
        walks.append([u for u, _ in walk])

    def area(nodes):
        s = 0.0
        for a, b in zip(nodes, nodes[1:] + nodes[:1]):
            s += pos[a][0] * pos[b][1] - pos[b][0] * pos[a][1]
        return s / 2.0

    # this next-dart rule walks bounded faces clockwise: the single outer
    # face is the one with positive (counter-clockwise) signed area
    areas = [area(w) for w in walks]
    outer = areas.index(max(areas))
    internal = [w for i, w in enumerate(walks) if i != outer]
    active_nodes = sum(1 for n in range(net.num_nodes) if net.incident[n])
    if len(internal) != net.num_edges - active_nodes + 1:
        raise PlanarityError("face count does not match a plane embedding")
    if any(area(w) >= 0 for w in internal):
        raise PlanarityError("drawing produced a degenerate internal face")
    return [_canonical_cycle(w) for w in internal]


def _check_no_crossings(net):
    pos = net.coords

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        eps = 1e-12 * (1.0 + abs(v))
        if v > eps:
            return 1
        if v < -eps:
            return -1
        return 0

    def on_segment(a, b, c):
        return (min(a[0], b[0]) - 1e-12 <= c[0] <= max(a[0], b[0]) + 1e-12
                and min(a[1], b[1]) - 1e-12 <= c[1] <= max(a[1], b[1]) + 1e-12)

    m = net.num_edges
    for e in range(m):
        a, b = (pos[n] for n in net.endpoints[e])
        for f in range(e + 1, m):
            if set(net.endpoints[e]) & set(net.endpoints[f]):
                continue
            c, d = (pos[n] for n in net.endpoints[f])
            o1, o2 = orient(a, b, c), orient(a, b, d)
            o3, o4 = orient(c, d, a), orient(c, d, b)
            crossing = (o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4))
            touching = ((o1 == 0 and on_segment(a, b, c)) or (o2 == 0 and on_segment(a, b, d))
                        or (o3 == 0 and on_segment(c, d, a)) or (o4 == 0 and on_segment(c, d, b)))
            if crossing or touching:
                raise PlanarityError(
                    f"edges {net.edge_labels[e]!r} and {net.edge_labels[f]!r} cross in the drawing")
