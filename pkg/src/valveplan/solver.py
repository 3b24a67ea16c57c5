"""Exact minimax branch and bound over valve placements.

The search assigns one slot at a time (valve present / absent) and keeps,
for the fixed number of valves, the placement whose worst single-pipe break
loses the least demand. The opponent's side of the game needs no search of
its own: once a placement is complete, the worst break is found by exact
per-sector evaluation.

Three pruning families cut the tree:

* face rule: a closed face cycle of the drawing cannot carry exactly one
  valve (a lone valve on a cycle separates nothing);
* symmetry rule: at a non-source degree-2 node the two surrounding slots
  are interchangeable, so one of them is pinned empty up front;
* bound rule: classes of nodes already known to share a sector carry a
  demand lower bound; once a class reaches the incumbent the branch is
  dead, and when joining two classes would reach it the joining slot is
  forced to take a valve (reduced-cost style fixing).

The class bound ignores unintended isolation, which only adds damage, so
it never overestimates a completion. Improvements are strict: each new
incumbent imposes `ud < best` from then on. By default the search continues
in place after an improvement; `restart_mode="restarting"` instead abandons
the tree and starts over with the tightened bound, which reproduces the
slower restart-per-solution behaviour for comparison.
"""

import logging
import math
import time
from collections import deque
from dataclasses import dataclass, replace

from .isolation import worst_case_fast
from .state import ABSENT, PRESENT, UNDECIDED, TrailedState

log = logging.getLogger(__name__)

BRANCH_HEURISTICS = ("max-lb", "heaviest-edge", "lex")
RESTART_MODES = ("continuing", "restarting")


class InfeasibleBudget(Exception):
    """No placement of the requested size can isolate every pipe."""

    def __init__(self, message, witness_edge=None):
        super().__init__(message)
        self.witness_edge = witness_edge


class _LimitExceeded(Exception):
    pass


@dataclass
class SolverOptions:
    face_constraints: bool = True
    symmetry: bool = True
    lb_prune: bool = True
    reduced_cost: bool = True
    restart_mode: str = "continuing"
    branch_heuristic: str = "max-lb"
    value_order: str = "present-first"      # or "absent-first"
    time_limit: float | None = None          # seconds
    node_limit: int | None = None
    seed: int | None = None                  # reserved; the search itself is deterministic
    initial_incumbent: frozenset | None = None
    on_incumbent: object = None              # callable(elapsed_s, ud_mls) or None

    def __post_init__(self):
        if self.restart_mode not in RESTART_MODES:
            raise ValueError(f"restart_mode must be one of {RESTART_MODES}")
        if self.branch_heuristic not in BRANCH_HEURISTICS:
            raise ValueError(f"branch_heuristic must be one of {BRANCH_HEURISTICS}")
        if self.value_order not in ("present-first", "absent-first"):
            raise ValueError("value_order must be present-first or absent-first")


@dataclass
class SearchStats:
    nodes: int = 0
    leaves: int = 0
    lb_prunes: int = 0
    face_fails: int = 0
    face_forced: int = 0
    budget_fails: int = 0
    conflicts: int = 0
    reduced_cost_forced: int = 0
    symmetry_fixed: int = 0
    infeasible_leaves: int = 0
    rejected_leaves: int = 0
    restarts: int = 0
    symmetry_capacity_skip: bool = False
    structural_rules_demoted: bool = False

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class Solution:
    placement: frozenset | None
    ud: float                    # ml/s; math.inf when nothing was found
    argmax_edge: int | None
    proof: str                   # "optimal" | "best-found"
    stats: SearchStats
    anytime: list                # [(elapsed_seconds, ud_mls)], strictly improving
    elapsed: float

    def tokens(self, net):
        return net.placement_tokens(self.placement) if self.placement else []


def symmetry_forced_slots(net):
    """Slots pinned empty by the degree-2 interchange argument.

    At a non-source node of degree two, a valve on either surrounding slot
    splits the same pair of pipes and nodes carry no demand, so only the
    slot on the lower-numbered edge is kept available. Source nodes are
    exempt: which side keeps the source genuinely matters there.
    """
    forced = []
    for node in range(net.num_nodes):
        if node in net.sources or net.degree(node) != 2:
            continue
        eb = max(net.incident[node])
        forced.append(net.slot_id(eb, node))
    return forced


def required_source_slots(net):
    """Every slot next to a source must carry a valve in any feasible
    placement, else the pipe behind it can never be de-watered."""
    return sum(net.degree(s) for s in net.sources)


def face_slot_lists(net):
    """Per face: the slot multiset of its boundary cycle (two per pipe,
    pipes walked twice contribute twice)."""
    if net.faces is None:
        return []
    out = []
    for cycle in net.faces:
        slots = []
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            e = net.edge_between(a, b)
            slots.append(2 * e)
            slots.append(2 * e + 1)
        out.append(slots)
    return out


class Search:
    """One depth-first solve. Exposed for tests and observers; use
    :func:`solve` for the high-level entry point.

    The incumbent tuple is replaced atomically, so `snapshot()` may be
    polled from another thread while the search runs.
    """

    def __init__(self, net, n_valves, opts):
        self.net = net
        self.nv = n_valves
        self.opts = opts
        self.state = TrailedState(net)
        self.stats = SearchStats()
        self._best = (math.inf, None, None)   # (ud, placement, argmax edge)
        self.anytime = []
        self.witness_edge = None
        self._restart = False
        self._order = (PRESENT, ABSENT) if opts.value_order == "present-first" else (ABSENT, PRESENT)
        self.t0 = time.perf_counter()

        self.face_slots = face_slot_lists(net) if opts.face_constraints else []
        self.slot_faces = [[] for _ in range(net.num_slots)]
        for i, slots in enumerate(self.face_slots):
            for s in set(slots):
                self.slot_faces[s].append(i)

    # -- incumbent ----------------------------------------------------------

    @property
    def incumbent_ud(self):
        return self._best[0]

    @property
    def incumbent(self):
        return self._best[1]

    def snapshot(self):
        """(ud_mls, placement, argmax_edge) of the best solution so far."""
        return self._best

    def elapsed(self):
        return time.perf_counter() - self.t0

    def _install(self, ud, placement, edge):
        self._best = (ud, placement, edge)
        self.anytime.append((self.elapsed(), ud))
        if self.opts.on_incumbent:
            self.opts.on_incumbent(self.anytime[-1][0], ud)

    def try_incumbent(self, placement):
        """Re-evaluate a candidate placement and install it if it is a
        valid strict improvement. Returns True when installed."""
        if len(placement) != self.nv:
            return False
        mask = 0
        for s in placement:
            mask |= 1 << s
        ud, edge, feasible = worst_case_fast(self.net, mask)
        if feasible and ud < self.incumbent_ud:
            self._install(ud, frozenset(placement), edge)
            return True
        return False

    # -- propagation ---------------------------------------------------------

    def decide(self, slot, value):
        """Assign and propagate to fixpoint. False means the branch failed."""
        st = self.state
        nv = self.nv
        pending = deque()
        pending.append((slot, value))
        while pending:
            s, v = pending.popleft()
            cur = st.value[s]
            if cur == v:
                continue
            if cur != UNDECIDED:
                self.stats.conflicts += 1
                return False
            st.set_value(s, v)

            if v == PRESENT:
                if st.n_present > nv:
                    self.stats.budget_fails += 1
                    return False
            else:
                if st.n_present + st.n_undecided < nv:
                    self.stats.budget_fails += 1
                    return False
                root = st.register_absent(s)
                if self.opts.lb_prune and st.lb[root] >= self.incumbent_ud:
                    self.stats.lb_prunes += 1
                    return False
                if self.opts.reduced_cost:
                    opp = s ^ 1
                    if st.value[opp] == UNDECIDED:
                        other = st.find(self.net.slot_other_node(s))
                        if other != root and st.lb[root] + st.lb[other] >= self.incumbent_ud:
                            self.stats.reduced_cost_forced += 1
                            pending.append((opp, PRESENT))

            for fi in self.slot_faces[s]:
                n_present = n_undecided = 0
                last_undecided = -1
                for fs in self.face_slots[fi]:
                    fv = st.value[fs]
                    if fv == PRESENT:
                        n_present += 1
                    elif fv == UNDECIDED:
                        n_undecided += 1
                        last_undecided = fs
                if n_present >= 2:
                    continue
                if n_present == 1 and n_undecided == 0:
                    self.stats.face_fails += 1
                    return False
                if n_undecided == 1:
                    self.stats.face_forced += 1
                    pending.append((last_undecided, PRESENT if n_present == 1 else ABSENT))

            if st.n_undecided:
                if st.n_present == nv:
                    pending.extend((u, ABSENT) for u in self._undecided_slots())
                elif st.n_present + st.n_undecided == nv:
                    pending.extend((u, PRESENT) for u in self._undecided_slots())
        return True

    def _undecided_slots(self):
        value = self.state.value
        return [s for s in range(self.net.num_slots) if value[s] == UNDECIDED]

    # -- branching ------------------------------------------------------------

    def choose_branch(self):
        """Undecided slot to branch on next (None when complete).

        Default order: slot on the frontier of the class with the largest
        bound, then heaviest pipe, then lowest slot id.
        """
        st = self.state
        heuristic = self.opts.branch_heuristic
        best = None
        best_key = None
        for slot in range(self.net.num_slots):
            if st.value[slot] != UNDECIDED:
                continue
            if heuristic == "lex":
                return slot
            e = slot >> 1
            if heuristic == "max-lb":
                key = (st.lb[st.find(self.net.slot_node(slot))], self.net.demand[e], -slot)
            else:
                key = (self.net.demand[e], -slot)
            if best_key is None or key > best_key:
                best_key = key
                best = slot
        return best

    # -- search ---------------------------------------------------------------

    def _check_limits(self):
        o = self.opts
        if o.node_limit is not None and self.stats.nodes > o.node_limit:
            raise _LimitExceeded
        if o.time_limit is not None and self.elapsed() > o.time_limit:
            raise _LimitExceeded

    def _leaf(self):
        st = self.state
        self.stats.leaves += 1
        assert st.n_present == self.nv
        mask = st.present_mask()
        ud, edge, feasible = worst_case_fast(self.net, mask)
        if not feasible:
            self.stats.infeasible_leaves += 1
            self.witness_edge = edge
            return
        if ud < self.incumbent_ud:
            self._install(ud, st.present_slots(), edge)
            if self.opts.restart_mode == "restarting":
                self._restart = True
        else:
            self.stats.rejected_leaves += 1

    def explore(self):
        self.stats.nodes += 1
        self._check_limits()
        st = self.state
        if st.n_undecided == 0:
            self._leaf()
            return
        slot = self.choose_branch()
        for value in self._order:
            st.push_frame()
            if self.decide(slot, value):
                self.explore()
            st.undo_frame()
            if self._restart:
                return

    def init_root(self):
        """Apply up-front decisions. False when the root is already dead."""
        if self.opts.symmetry:
            forced = symmetry_forced_slots(self.net)
            if self.nv > self.net.num_slots - len(forced):
                # pinning these slots would leave too few places for the
                # requested valves; the rule is skipped for this budget
                self.stats.symmetry_capacity_skip = True
                log.info("symmetry rule skipped: budget %d exceeds the %d "
                         "slots left after pinning", self.nv,
                         self.net.num_slots - len(forced))
            else:
                for slot in forced:
                    if self.state.value[slot] != UNDECIDED:
                        continue
                    self.stats.symmetry_fixed += 1
                    if not self.decide(slot, ABSENT):
                        return False
        st = self.state
        if st.n_undecided and st.n_present + st.n_undecided == self.nv:
            for slot in self._undecided_slots():
                if st.value[slot] == UNDECIDED and not self.decide(slot, PRESENT):
                    return False
        return True

    def run(self):
        while True:
            self._restart = False
            self.explore()
            if not self._restart:
                return
            self.stats.restarts += 1


def solve(net, n_valves, opts=None):
    """Optimal placement of exactly `n_valves` valves.

    Returns a Solution with proof "optimal" when the search completed, or
    "best-found" when a time/node limit expired first. Raises
    InfeasibleBudget (with a witness pipe) when no placement of that size
    can isolate every pipe, and ValueError for budgets outside
    [1, 2 * num_edges].
    """
    if opts is None:
        opts = SolverOptions()
    if not 1 <= n_valves <= net.num_slots:
        raise ValueError(f"valve budget must be in [1, {net.num_slots}], got {n_valves}")

    required = required_source_slots(net)
    if n_valves < required:
        witness = min(net.incident[min(net.sources)])
        raise InfeasibleBudget(
            f"{n_valves} valves cannot isolate the pipes next to the sources: "
            f"every source-side slot needs one ({required} in total)",
            witness_edge=witness)

    search = Search(net, n_valves, opts)
    if opts.initial_incumbent is not None:
        search.try_incumbent(opts.initial_incumbent)

    limited = False
    if search.init_root():
        try:
            search.run()
        except _LimitExceeded:
            limited = True

    elapsed = search.elapsed()
    ud, placement, edge = search.snapshot()
    if placement is None:
        if limited:
            return Solution(None, math.inf, None, "best-found", search.stats,
                            search.anytime, elapsed)
        if opts.face_constraints or opts.symmetry:
            # the structural rules are pruning devices; re-verify emptiness
            # without them before declaring the budget infeasible
            retry = solve(net, n_valves,
                          replace(opts, face_constraints=False, symmetry=False))
            retry.stats.structural_rules_demoted = True
            log.warning("structural pruning rules excluded every solution at "
                        "budget %d; returning the unpruned optimum", n_valves)
            return retry
        raise InfeasibleBudget(
            f"no placement of {n_valves} valves isolates every pipe",
            witness_edge=search.witness_edge)

    proof = "best-found" if limited else "optimal"
    return Solution(placement, ud, edge, proof, search.stats, search.anytime, elapsed)
