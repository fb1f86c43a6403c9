"""Command-line interface.

Exit codes: 0 yes/success, 1 no, 2 budget exhausted, 3 usage or format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .emit import check_emission, emit_permutation
from .errors import BudgetExhausted, DepthExceeded, SbtError
from .formats import (
    assembling_from_meta,
    default_meta_path,
    load_3dt,
    read_dimacs,
    read_meta,
    save_3dt,
    write_meta,
)
from .gadgets import BASIC_KINDS, behavior_graph, make_harness
from .perm import Permutation
from .pipeline import run_pipeline
from .reduction import Assignment, normalize, reduce
from .search import (
    ORDERS,
    SearchConfig,
    SearchStats,
    bfs_distance_oracle,
    collapse_search,
    db3_sort_decision,
    exact_distance,
    read_trace,
    replay_instance,
    replay_permutation,
    write_trace,
)
from .tdt import TdtInstance, is_equivalent

EXIT_YES, EXIT_NO, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which we reserve for budgets
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _search_config(args) -> SearchConfig:
    return SearchConfig(workers=args.jobs, node_budget=args.budget, order=args.order, prune=args.prune)


def _add_search_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jobs", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--budget", type=int, default=None, help="maximum number of expanded states")
    p.add_argument("--order", choices=ORDERS, default="leftmost", help="move ordering")
    p.add_argument("--prune", action="store_true", help="explore only a persistent subset of moves at each state")


def cmd_reduce(args) -> int:
    f = read_dimacs(args.cnf)
    g = normalize(f)
    out = reduce(g)
    save_3dt(args.output, out.assembling.instance)
    meta = out.metadata()
    meta["source_formula"] = {"m": f.m, "clauses": [list(c) for c in f.clauses]}
    write_meta(args.meta or default_meta_path(args.output), meta)
    print(f"n={out.assembling.span} triples={len(out.assembling.instance.triples)} blocks={len(out.assembling.specs)}")
    return EXIT_YES


def cmd_emit(args) -> int:
    inst = load_3dt(args.tdt)
    asm = assembling_from_meta(read_meta(args.meta or default_meta_path(args.tdt)), inst)
    emitted = emit_permutation(asm)
    problems = check_emission(asm, emitted)
    if problems:
        print("\n".join(problems), file=sys.stderr)
        return EXIT_NO
    Path(args.output).write_text(str(emitted.permutation) + "\n")
    if args.layout:
        lay = emitted.layout
        report = {
            "p": list(lay.p),
            "q": list(lay.q),
            "alpha": lay.alpha,
            "beta": lay.beta,
            "P": [sorted(emitted.image_set(asm, h)) for h in range(len(asm.specs))],
        }
        Path(args.layout).write_text(json.dumps(report, indent=2) + "\n")
    return EXIT_YES


def cmd_collapse(args) -> int:
    inst = load_3dt(args.tdt)
    stats = SearchStats()
    trace = collapse_search(inst, _search_config(args), stats)
    print(f"expanded={stats.expanded} dead={stats.dead}")
    if trace is None:
        print("not collapsible")
        return EXIT_NO
    print(f"collapsible in {len(trace)} steps")
    if args.trace:
        write_trace(args.trace, trace, inst)
    return EXIT_YES


def cmd_sort(args) -> int:
    p = Permutation.parse(Path(args.perm).read_text())
    if args.mode == "exact":
        try:
            print(exact_distance(p, args.max_depth))
        except DepthExceeded as exc:
            print(exc)
            return EXIT_NO
        return EXIT_YES
    if args.mode == "oracle":
        print(bfs_distance_oracle(p))
        return EXIT_YES
    trace = db3_sort_decision(p, _search_config(args))
    if trace is None:
        print("no")
        return EXIT_NO
    print(f"yes: sorted in {len(trace)} moves")
    if args.trace:
        write_trace(args.trace, trace, p)
    return EXIT_YES


def cmd_check_equiv(args) -> int:
    inst = load_3dt(args.tdt)
    p = Permutation.parse(Path(args.perm).read_text())
    ok = is_equivalent(inst, p)
    print("equivalent" if ok else "not equivalent")
    return EXIT_YES if ok else EXIT_NO


def cmd_behavior(args) -> int:
    graph = behavior_graph(make_harness(args.kind))
    Path(args.dot).write_text(graph.to_dot(args.kind))
    print(f"nodes={len(graph.nodes)} edges={len(graph.edges)} acyclic={graph.is_acyclic()}")
    return EXIT_YES


def cmd_verify(args) -> int:
    f = read_dimacs(args.cnf)
    assignment = Assignment.from_bits(args.assignment) if args.assignment else None
    if assignment is not None and not assignment.satisfies(f):
        print(f"assignment {args.assignment} does not satisfy the formula", file=sys.stderr)
        return EXIT_USAGE
    if args.trace_dir:
        Path(args.trace_dir).mkdir(parents=True, exist_ok=True)
    report = run_pipeline(
        f, assignment, _search_config(args), Path(args.trace_dir) if args.trace_dir else None, not args.no_search
    )
    text = report.to_json()
    if args.report:
        Path(args.report).write_text(text + "\n")
    print(text)
    return report.exit_code()


def cmd_replay(args) -> int:
    text = Path(args.start).read_text()
    trace = read_trace(args.trace)
    if text.lstrip().startswith("span"):
        final = replay_instance(TdtInstance.parse(text), trace)[-1]
        print(final.word_string())
        return EXIT_YES if final.is_empty() else EXIT_NO
    final_p = replay_permutation(Permutation.parse(text), trace)[-1]
    print(final_p)
    return EXIT_YES if final_p.is_identity() else EXIT_NO


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sbtkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reduce", help="compile a DIMACS formula into a 3DT-instance")
    p.add_argument("cnf")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--meta", help="metadata sidecar (default: OUTPUT.meta.json)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("emit-perm", help="permutation equivalent to a reduced 3DT-instance")
    p.add_argument("tdt")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--meta", help="metadata sidecar (default: TDT.meta.json)")
    p.add_argument("--layout", metavar="FILE", help="also write the p/q/alpha/beta tables")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser("collapse", help="decide whether a 3DT-instance is collapsible")
    p.add_argument("tdt")
    p.add_argument("--trace")
    _add_search_options(p)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("sort", help="transposition distance of a permutation")
    p.add_argument("perm")
    p.add_argument("--mode", choices=("exact", "decision", "oracle"), default="exact")
    p.add_argument("--max-depth", type=int, default=20)
    p.add_argument("--trace")
    _add_search_options(p)
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("check-equiv", help="test the equivalence of a 3DT-instance and a permutation")
    p.add_argument("tdt")
    p.add_argument("perm")
    p.set_defaults(func=cmd_check_equiv)

    p = sub.add_parser("behavior", help="DOT graph of a block's behavior")
    p.add_argument("kind", choices=BASIC_KINDS)
    p.add_argument("--dot", required=True)
    p.set_defaults(func=cmd_behavior)

    p = sub.add_parser("verify", help="run the whole reduction with cross-checks")
    p.add_argument("cnf")
    p.add_argument("--assignment", help="bit string, e.g. 1010 sets x1 and x3")
    p.add_argument("--trace-dir")
    p.add_argument("--report", help="also write the JSON report here")
    p.add_argument("--no-search", action="store_true", help="skip the exhaustive searches")
    _add_search_options(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", help="replay a trace file on a 3DT-instance or permutation")
    p.add_argument("trace")
    p.add_argument("start")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SbtError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
