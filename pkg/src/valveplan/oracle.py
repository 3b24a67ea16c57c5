"""Brute-force ground truth for small instances.

Enumerates every way to place the valves, evaluates each placement exactly,
and reports the optimum with all witnesses. The solver's central
correctness property is agreement with this module wherever enumeration is
affordable.
"""

import math
from dataclasses import dataclass
from itertools import combinations

from .isolation import worst_case_fast

DEFAULT_CAP = 5_000_000


class EnumerationCapExceeded(Exception):
    pass


@dataclass
class OracleResult:
    ud: float                    # ml/s; math.inf when every placement is infeasible
    optimal: tuple               # all optimal placements, as frozensets of slots
    count: int                   # placements enumerated, C(2m, nv)
    all_infeasible: bool
    table: list | None = None    # optional [(placement, ud, feasible)]


def brute_force(net, n_valves, cap=DEFAULT_CAP, record_table=False):
    """Exhaustive optimum over all C(2m, n_valves) placements.

    Enumeration is lexicographic by slot index. Raises
    EnumerationCapExceeded when the count would exceed `cap`.
    """
    if not 1 <= n_valves <= net.num_slots:
        raise ValueError(f"valve budget must be in [1, {net.num_slots}], got {n_valves}")
    expected = math.comb(net.num_slots, n_valves)
    if expected > cap:
        raise EnumerationCapExceeded(
            f"C({net.num_slots}, {n_valves}) = {expected} exceeds the cap of {cap}")

    best = math.inf
    winners = []
    count = 0
    table = [] if record_table else None
    for combo in combinations(range(net.num_slots), n_valves):
        count += 1
        mask = 0
        for s in combo:
            mask |= 1 << s
        ud, _, feasible = worst_case_fast(net, mask)
        if record_table:
            table.append((frozenset(combo), ud, feasible))
        if not feasible:
            continue
        if ud < best:
            best = ud
            winners = [combo]
        elif ud == best:
            winners.append(combo)
    return OracleResult(ud=best,
                        optimal=tuple(frozenset(c) for c in winners),
                        count=count,
                        all_infeasible=not winners,
                        table=table)
