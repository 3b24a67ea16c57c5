"""Command-line front end.

Subcommands: `evaluate` a given placement, `solve` one valve budget,
`sweep` a budget range for the cost/damage frontier, and `check` the solver
against brute-force enumeration (single instance or a seeded random corpus).

Exit codes: 0 success, 1 input error, 2 infeasible, 3 limit expired with
only a best-found answer, 4 check mismatch.
"""

import argparse
import math
import sys

from . import instances
from .generate import random_instance
from .isolation import delivered_with_closed, sectors
from .network import InstanceError, format_flow, parse_placement
from .oracle import EnumerationCapExceeded, brute_force
from .pareto import sweep
from .solver import InfeasibleBudget, SolverOptions, solve

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3
EXIT_MISMATCH = 4


class _Report:
    """Collects output lines; timing lines are marked so reruns of the same
    command are byte-identical apart from them."""

    def __init__(self, fmt):
        self.fmt = fmt
        self.lines = []

    def kv(self, key, value):
        self.lines.append(f"{key}: {value}")

    def timing(self, key, value):
        self.lines.append(f"{key}: {value}\t#timing")

    def row(self, *cells):
        sep = "," if self.fmt == "csv" else "  "
        self.lines.append(sep.join(str(c) for c in cells))

    def emit(self, stream=None):
        print("\n".join(self.lines), file=stream or sys.stdout)


def _instance_digest(report, net):
    report.kv("instance", net.name or "<unnamed>")
    report.kv("nodes", net.num_nodes)
    report.kv("edges", net.num_edges)
    report.kv("sources", len(net.sources))
    report.kv("total_demand_lps", format_flow(net.total_demand))


def _solver_options(args):
    return SolverOptions(
        face_constraints=not args.no_faces,
        symmetry=not args.no_symmetry,
        lb_prune=not args.no_bound,
        reduced_cost=not args.no_reduced_cost,
        restart_mode=args.restart_mode,
        branch_heuristic=args.branch,
        time_limit=args.time_limit,
        node_limit=args.node_limit,
        seed=args.seed,
    )


def _add_solver_flags(p):
    p.add_argument("--no-faces", action="store_true", help="disable the face pruning rule")
    p.add_argument("--no-symmetry", action="store_true", help="disable degree-2 symmetry breaking")
    p.add_argument("--no-bound", action="store_true", help="disable sector lower-bound pruning")
    p.add_argument("--no-reduced-cost", action="store_true", help="disable reduced-cost valve fixing")
    p.add_argument("--restart-mode", choices=("continuing", "restarting"), default="continuing")
    p.add_argument("--branch", choices=("max-lb", "heaviest-edge", "lex"), default="max-lb")
    p.add_argument("--time-limit", type=float, default=None, help="seconds per solve")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)


def _parse_range(text):
    if ".." in text:
        lo, hi = text.split("..", 1)
        return range(int(lo), int(hi) + 1)
    return range(int(text), int(text) + 1)


def _write_anytime(path, anytime):
    with open(path, "w", encoding="utf-8") as fh:
        for elapsed, ud in anytime:
            fh.write(f"{int(elapsed * 1000)},{format_flow(ud)}\n")


def _solution_block(report, net, sol):
    report.kv("ud_lps", format_flow(sol.ud))
    report.kv("worst_break", net.edge_labels[sol.argmax_edge] if sol.argmax_edge is not None else "-")
    report.kv("proof", sol.proof)
    report.kv("placement", " ".join(sol.tokens(net)))
    for key, value in sol.stats.as_dict().items():
        report.kv(f"stat_{key}", value)
    report.timing("elapsed_s", f"{sol.elapsed:.3f}")


def cmd_evaluate(args):
    report = _Report(args.format)
    net = instances.load(args.instance)
    with open(args.placement, "r", encoding="utf-8") as fh:
        placement = parse_placement(net, fh.read())
    _instance_digest(report, net)
    report.kv("valves", len(placement))
    part = sectors(net, placement)
    report.row("edge", "sector", "closed_valves", "ud_lps", "isolable")
    worst = -1
    worst_edge = None
    feasible = True
    per_sector = []
    for sec in part.sectors:
        if sec.contains_source:
            per_sector.append((None, False))
            feasible = False
            continue
        closed = 0
        for s in sec.boundary:
            closed |= 1 << s
        _, delivered = delivered_with_closed(net, closed)
        per_sector.append((net.total_demand - delivered, True))
    for e in range(net.num_edges):
        pos = part.edge_sector[e]
        ud, ok = per_sector[pos]
        report.row(net.edge_labels[e], pos, len(part.sectors[pos].boundary),
                   format_flow(ud) if ok else "inf", "yes" if ok else "no")
        if ok and ud > worst:
            worst, worst_edge = ud, e
    if not feasible:
        report.kv("result", "infeasible: some pipe cannot be isolated")
        report.emit()
        return EXIT_INFEASIBLE
    report.kv("worst_case_ud_lps", format_flow(worst))
    report.kv("worst_break", net.edge_labels[worst_edge])
    report.emit()
    return EXIT_OK


def cmd_solve(args):
    report = _Report(args.format)
    net = instances.load(args.instance)
    _instance_digest(report, net)
    report.kv("n_valves", args.nv)
    try:
        sol = solve(net, args.nv, _solver_options(args))
    except InfeasibleBudget as exc:
        report.kv("result", f"infeasible budget: {exc}")
        if exc.witness_edge is not None:
            report.kv("witness_pipe", net.edge_labels[exc.witness_edge])
        report.emit()
        return EXIT_INFEASIBLE
    if args.anytime:
        _write_anytime(args.anytime, sol.anytime)
    if sol.placement is None:
        report.kv("result", "limit expired before any solution was found")
        report.emit()
        return EXIT_LIMIT
    _solution_block(report, net, sol)
    report.emit()
    return EXIT_OK if sol.proof == "optimal" else EXIT_LIMIT


def cmd_sweep(args):
    report = _Report(args.format)
    net = instances.load(args.instance)
    _instance_digest(report, net)
    result = sweep(net, _parse_range(args.nv), _solver_options(args),
                   warm_start=not args.no_warm_start)
    report.row("nv", "ud", "proof", "elapsed_ms")
    for pt in result.points:
        elapsed_ms = int(pt.elapsed * 1000)
        # keep csv rows clean for plotting; mark timing for text consumers
        cell = elapsed_ms if args.format == "csv" else f"{elapsed_ms}\t#timing"
        report.row(pt.n_valves, format_flow(pt.ud), pt.proof, cell)
    for note in result.notes:
        report.kv("note", note)
    if args.out_dir:
        import os
        os.makedirs(args.out_dir, exist_ok=True)
        for pt in result.points:
            path = os.path.join(args.out_dir, f"placement_nv{pt.n_valves}.txt")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write("\n".join(net.placement_tokens(pt.placement)) + "\n")
        report.kv("placements_written", args.out_dir)
    report.emit()
    if any(pt.proof != "optimal" for pt in result.points):
        return EXIT_LIMIT
    return EXIT_OK


def _check_one(report, net, nv, opts, cap):
    try:
        reference = brute_force(net, nv, cap=cap)
    except EnumerationCapExceeded as exc:
        report.kv("check", f"SKIP nv={nv}: {exc}")
        return True
    try:
        sol = solve(net, nv, opts)
        solver_ud = sol.ud if sol.proof == "optimal" else None
    except InfeasibleBudget:
        solver_ud = math.inf
    expect = math.inf if reference.all_infeasible else reference.ud
    ok = solver_ud == expect
    label = net.name or "<instance>"
    report.kv("check", f"{'PASS' if ok else 'FAIL'} {label} nv={nv} "
                       f"solver={format_flow(solver_ud) if solver_ud is not None else 'best-found'} "
                       f"oracle={format_flow(expect)}")
    return ok


def cmd_check(args):
    report = _Report(args.format)
    opts = _solver_options(args)
    all_ok = True
    if args.corpus:
        seed0 = args.seed if args.seed is not None else 0
        nvs = list(_parse_range(args.nv)) if args.nv else [2, 3, 4, 5]
        for i in range(args.corpus):
            net = random_instance(seed0 + i)
            for nv in nvs:
                all_ok &= _check_one(report, net, nv, opts, args.cap)
    else:
        if not args.instance or not args.nv:
            report.kv("error", "check needs an instance and --nv, or --corpus N")
            report.emit(sys.stderr)
            return EXIT_INPUT
        net = instances.load(args.instance)
        for nv in _parse_range(args.nv):
            all_ok &= _check_one(report, net, nv, opts, args.cap)
    report.kv("result", "PASS" if all_ok else "FAIL")
    report.emit()
    return EXIT_OK if all_ok else EXIT_MISMATCH


def build_parser():
    parser = argparse.ArgumentParser(
        prog="valveplan",
        description="Exact optimizer for isolation valve placement in water networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="evaluate a placement file against an instance")
    p.add_argument("instance", help="instance file or bundled name (fig1, fig2)")
    p.add_argument("placement", help="placement file of edge:node tokens")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("solve", help="optimal placement for one valve budget")
    p.add_argument("instance")
    p.add_argument("--nv", type=int, required=True, help="number of valves to place")
    p.add_argument("--anytime", metavar="PATH", help="write the incumbent log as CSV")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="frontier over a range of valve budgets")
    p.add_argument("instance")
    p.add_argument("--nv", required=True, help="budget range, e.g. 2..14")
    p.add_argument("--out-dir", help="directory for per-point placement files")
    p.add_argument("--no-warm-start", action="store_true")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="compare solver against brute force")
    p.add_argument("instance", nargs="?", help="instance file or bundled name")
    p.add_argument("--nv", help="budget or range, e.g. 6 or 2..5")
    p.add_argument("--corpus", type=int, metavar="N", default=0,
                   help="check N seeded random instances instead")
    p.add_argument("--cap", type=int, default=5_000_000, help="enumeration cap")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    _add_solver_flags(p)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InstanceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
