"""Valve count versus worst-case damage: frontier by repeated exact solves.

Both objectives matter when designing an isolation system: valves cost
money, damage costs service. With an integer valve count the two-objective
problem decomposes into one exact solve per count, followed by dominance
filtering.
"""

import logging
from dataclasses import dataclass, replace

from .isolation import worst_case_fast
from .solver import InfeasibleBudget, SolverOptions, solve

log = logging.getLogger(__name__)


@dataclass
class ParetoPoint:
    n_valves: int
    ud: float                  # ml/s
    placement: frozenset
    proof: str                 # "optimal" | "best-found"
    elapsed: float


@dataclass
class SweepResult:
    points: list               # the non-dominated frontier, ascending valve count
    dropped: list              # solved points removed by dominance
    notes: list                # human-readable skips (infeasible budgets etc.)


def _best_extension(net, placement):
    """Cheapest one-valve extension of a placement, or None.

    Used to seed the next solve's incumbent: a solution for k valves plus
    any extra valve is a candidate for k+1. Candidates are never trusted
    blindly; the solver re-evaluates before installing.
    """
    free = [s for s in range(net.num_slots) if s not in placement]
    best = None
    best_ud = None
    for s in free:
        mask = 0
        for t in placement:
            mask |= 1 << t
        mask |= 1 << s
        ud, _, feasible = worst_case_fast(net, mask)
        if feasible and (best_ud is None or ud < best_ud):
            best_ud = ud
            best = placement | {s}
    return best


def sweep(net, n_valves_range, opts=None, warm_start=True):
    """Solve each valve count in `n_valves_range` and keep the frontier.

    Points whose budget cannot isolate every pipe are skipped with a note.
    Points that hit a limit keep their best-found value and are flagged
    through their proof status.
    """
    if opts is None:
        opts = SolverOptions()
    nvs = sorted(set(n_valves_range))
    if not nvs:
        raise ValueError("empty valve-count range")

    solved = []
    notes = []
    prev = None
    for nv in nvs:
        run_opts = opts
        if warm_start and prev is not None:
            candidate = _best_extension(net, prev) if len(prev) < nv else None
            if candidate is not None and len(candidate) == nv:
                run_opts = replace(opts, initial_incumbent=frozenset(candidate))
        try:
            sol = solve(net, nv, run_opts)
        except InfeasibleBudget as exc:
            notes.append(f"n_valves={nv}: {exc}")
            continue
        if sol.placement is None:
            notes.append(f"n_valves={nv}: no solution within limits")
            continue
        solved.append(ParetoPoint(nv, sol.ud, sol.placement, sol.proof, sol.elapsed))
        prev = sol.placement

    points = []
    dropped = []
    best_ud = None
    for pt in solved:
        if best_ud is not None and pt.ud > best_ud:
            log.warning("worst-case damage rose from %s to %s when adding valves "
                        "(n_valves=%d); keeping the dominated point out of the frontier",
                        best_ud, pt.ud, pt.n_valves)
        if best_ud is None or pt.ud < best_ud:
            points.append(pt)
            best_ud = pt.ud
        else:
            dropped.append(pt)
    return SweepResult(points=points, dropped=dropped, notes=notes)
