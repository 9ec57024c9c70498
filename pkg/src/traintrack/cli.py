"""Command-line front end.

Exit codes: 0 success (for ``certify``: the map is principal), 2 parse
error, 3 precondition violation, 4 verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .automaton import (
    automaton_json,
    automaton_to_dot,
    build_automaton,
    node_one_analysis,
)
from .folds import stallings_decompose
from .graphs import GraphStructureError
from .mapdoc import ParseError, parse_map_document
from .reports import (
    certify_json,
    certify_map,
    certify_text,
    decompose_json,
    decompose_text,
)
from .search import single_fold_search, verify_minimal_stretch_argument

EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_VERIFICATION = 4


def _read_map(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)
    try:
        return parse_map_document(text)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _write_json(path: str | None, payload: dict) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


def cmd_certify(args) -> int:
    g = _read_map(args.file)
    if not g.is_self_map:
        print("error: certify needs a self-map", file=sys.stderr)
        return EXIT_PRECONDITION
    report = certify_map(g, args.pnp_bound, args.pnp_period)
    sys.stdout.write(certify_text(report))
    _write_json(args.json, certify_json(report))
    return 0 if report.verdict == "PRINCIPAL" else EXIT_VERIFICATION


def cmd_decompose(args) -> int:
    g = _read_map(args.file)
    try:
        seq = stallings_decompose(g)
    except GraphStructureError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    exact = seq.composed_map() == g
    sys.stdout.write(decompose_text(seq, exact))
    _write_json(args.json, decompose_json(seq, exact))
    return 0 if exact else EXIT_VERIFICATION


def cmd_automaton_build(args) -> int:
    try:
        automaton = build_automaton(args.rank)
    except GraphStructureError as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    analysis = node_one_analysis(automaton, loop_bound=args.loop_bound)
    print(
        f"nodes: {len(automaton.nodes)}; fold edges: {len(automaton.fold_edges)}; "
        f"relabeling classes: {automaton.n_classes}"
    )
    print(
        f"class-level components: {sorted(len(s) for s in automaton.sccs)}; "
        f"components with loops: {len(automaton.loop_sccs())}"
    )
    print(
        f"reference class {analysis.node_one_class}: removing it strands "
        f"{len(analysis.also_disconnected)} further classes; residual loop part has "
        f"{len(analysis.residual_loop_classes)} classes"
    )
    print(
        f"residual loops up to length {args.loop_bound}: {analysis.loops_checked}, "
        f"all reducible: {analysis.obstruction_holds}, "
        f"with protected label: {analysis.loops_with_protected_label}"
    )
    print(f"folds entering the reference node: {analysis.entering_folds}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(automaton_to_dot(automaton))
    _write_json(args.json, automaton_json(automaton, analysis))
    return 0 if analysis.obstruction_holds else EXIT_VERIFICATION


def cmd_search_single_fold(args) -> int:
    summary = single_fold_search(args.rank, jobs=args.jobs, shuffle_seed=args.seed)
    print(
        f"rank {summary.rank}: {summary.universe_size} graphs, "
        f"{summary.candidates} candidates, {summary.tt_count} train track, "
        f"{summary.irreducible_count} irreducible, {summary.fic_count} fully irreducible, "
        f"{summary.principal_count} principal"
    )
    print(f"{summary.class_count} relabeling class(es)")
    for idx in summary.class_representatives:
        rep = summary.survivors[idx]
        print("representative:")
        for line in rep.map.describe().splitlines():
            print("  " + line)
    _write_json(
        args.json,
        {
            "schema": "1",
            "kind": "single-fold-search",
            "rank": summary.rank,
            "universe": summary.universe_size,
            "candidates": summary.candidates,
            "train_track": summary.tt_count,
            "irreducible": summary.irreducible_count,
            "fully_irreducible": summary.fic_count,
            "principal": summary.principal_count,
            "classes": summary.class_count,
        },
    )
    expected = 1 if args.rank == 3 else 0
    return 0 if summary.class_count == expected else EXIT_VERIFICATION


def cmd_verify(args) -> int:
    if args.target == "theorem-a":
        report = verify_minimal_stretch_argument()
        for step in report.steps:
            print(("PASS " if step.passed else "FAIL ") + step.name + ": " + step.detail)
        print("theorem-a: " + ("PASS" if report.passed else "FAIL"))
        return 0 if report.passed else EXIT_VERIFICATION
    if args.target == "theorem-b":
        ranks = [int(r) for r in args.ranks.split(",")]
        ok = True
        for rank in ranks:
            summary = single_fold_search(rank, jobs=args.jobs)
            expected = 1 if rank == 3 else 0
            good = summary.class_count == expected
            ok = ok and good
            print(
                f"rank {rank}: {summary.class_count} class(es), expected {expected}: "
                + ("PASS" if good else "FAIL")
            )
        print("theorem-b: " + ("PASS" if ok else "FAIL"))
        return 0 if ok else EXIT_VERIFICATION
    print(f"unknown verification target {args.target!r}", file=sys.stderr)
    return EXIT_PRECONDITION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="traintrack",
        description="Train track maps: certification, fold decompositions, "
        "the rank-3 principal stratum automaton, and exhaustive searches.",
    )
    parser.add_argument("--pnp-bound", type=int, default=50, metavar="L",
                        help="length bound for the periodic-path search")
    parser.add_argument("--pnp-period", type=int, default=None, metavar="K",
                        help="period bound for the periodic-path search")
    parser.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="parallel workers for searches")
    parser.add_argument("--seed", type=int, default=None, metavar="S",
                        help="shuffle seed for determinism self-tests")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="full pipeline report for a map document")
    p.add_argument("file")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("decompose", help="Stallings fold decomposition")
    p.add_argument("file")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("automaton", help="automaton commands")
    asub = p.add_subparsers(dest="subcommand", required=True)
    pb = asub.add_parser("build", help="build the principal stratum automaton")
    pb.add_argument("--rank", type=int, default=3)
    pb.add_argument("--loop-bound", type=int, default=3)
    pb.add_argument("--dot", metavar="PATH")
    pb.add_argument("--json", metavar="PATH")
    pb.set_defaults(func=cmd_automaton_build)

    p = sub.add_parser("search", help="exhaustive searches")
    ssub = p.add_subparsers(dest="subcommand", required=True)
    ps = ssub.add_parser("single-fold", help="single-fold uniqueness search")
    ps.add_argument("--rank", type=int, required=True, choices=(3, 4, 5))
    ps.add_argument("--json", metavar="PATH")
    ps.set_defaults(func=cmd_search_single_fold)

    p = sub.add_parser("verify", help="acceptance drivers")
    p.add_argument("target", choices=("theorem-a", "theorem-b"))
    p.add_argument("--ranks", default="3,4,5",
                   help="comma-separated ranks for theorem-b")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
