"""Reversible search state: slot assignments plus sector lower bounds.

Every mutation is recorded on a trail; `push_frame` / `undo_frame` bracket
one search decision and restore the exact prior state on backtracking.

The bound bookkeeping follows single-count accounting: an edge's demand
enters a class lower bound exactly once, when its first slot is decided
absent (the pipe then certainly shares a sector with that endpoint).
When both slots of an edge are absent the endpoint classes merge and their
bounds add, the shared edge having already been counted.
"""

UNDECIDED, PRESENT, ABSENT = 0, 1, 2


class TrailedState:
    def __init__(self, net):
        self.net = net
        n = net.num_nodes
        self.value = bytearray(net.num_slots)
        self.n_present = 0
        self.n_absent = 0
        self.parent = list(range(n))
        self.size = [1] * n
        self.lb = [0] * n                       # valid at class roots
        self.has_source = [n_ in net.sources for n_ in range(n)]
        self.attached = bytearray(net.num_edges)
        self._trail = []
        self._frames = []

    @property
    def n_undecided(self):
        return self.net.num_slots - self.n_present - self.n_absent

    def find(self, x):
        p = self.parent
        while p[x] != x:
            x = p[x]
        return x

    def push_frame(self):
        self._frames.append(len(self._trail))

    def undo_frame(self):
        mark = self._frames.pop()
        trail = self._trail
        while len(trail) > mark:
            entry = trail.pop()
            tag = entry[0]
            if tag == 0:                        # value write
                slot = entry[1]
                if self.value[slot] == PRESENT:
                    self.n_present -= 1
                else:
                    self.n_absent -= 1
                self.value[slot] = UNDECIDED
            elif tag == 1:                      # edge attach
                _, e, root = entry
                self.attached[e] = 0
                self.lb[root] -= self.net.demand[e]
            else:                               # union
                _, child, root, old_lb, old_src, old_size = entry
                self.parent[child] = child
                self.lb[root] = old_lb
                self.has_source[root] = old_src
                self.size[root] = old_size

    def set_value(self, slot, v):
        assert self.value[slot] == UNDECIDED
        self.value[slot] = v
        if v == PRESENT:
            self.n_present += 1
        else:
            self.n_absent += 1
        self._trail.append((0, slot))

    def register_absent(self, slot):
        """Bound bookkeeping after `slot` was set absent. Returns the class
        root whose bound may have grown."""
        e = slot >> 1
        node = self.net.slot_node(slot)
        root = self.find(node)
        if not self.attached[e]:
            self.attached[e] = 1
            self.lb[root] += self.net.demand[e]
            self._trail.append((1, e, root))
        opp = slot ^ 1
        if self.value[opp] == ABSENT:
            other_root = self.find(self.net.slot_other_node(slot))
            root = self._union(root, other_root)
        return root

    def _union(self, ra, rb):
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self._trail.append((2, rb, ra, self.lb[ra], self.has_source[ra], self.size[ra]))
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.lb[ra] += self.lb[rb]
        self.has_source[ra] = self.has_source[ra] or self.has_source[rb]
        return ra

    # -- inspection helpers (search heuristics and tests) --------------------

    def roots(self):
        return [n for n in range(self.net.num_nodes) if self.parent[n] == n]

    def max_lb(self):
        return max(self.lb[r] for r in self.roots())

    def classes(self):
        """Canonical snapshot {frozenset(node ids): (lb, has_source)}."""
        groups = {}
        for n in range(self.net.num_nodes):
            groups.setdefault(self.find(n), set()).add(n)
        return {frozenset(v): (self.lb[r], self.has_source[r]) for r, v in groups.items()}

    def present_slots(self):
        return frozenset(s for s in range(self.net.num_slots) if self.value[s] == PRESENT)

    def present_mask(self):
        mask = 0
        for s in range(self.net.num_slots):
            if self.value[s] == PRESENT:
                mask |= 1 << s
        return mask
