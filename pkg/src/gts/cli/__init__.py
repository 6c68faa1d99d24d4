"""Command line interface: ``gts run`` and ``gts corpus``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .corpus import SelectionError, load_manifest, run_case, select
from .dsl import ScriptError, parse
from .runner import Flags, render_json, render_text, run_script


def _add_flags(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true", help="machine-readable report (schema 1)")
    p.add_argument("--order", choices=("top", "pot"), default="top", help="module monomial order")
    p.add_argument("--dmax", type=int, default=6, help="oracle degree bound")
    p.add_argument("--guardrail", type=int, default=None, help="limit on m**n (default 100000)")
    p.add_argument("--oracle", action="store_true", help="run the graded oracle next to each canonical check")
    p.add_argument("--witness-verify", dest="witness_verify", action=argparse.BooleanOptionalAction,
                   default=True, help="re-verify witnesses before reporting them")
    p.add_argument("--timing", action="store_true", help="include wall-clock times")
    p.add_argument("--parallel", action="store_true", help="run queries in worker processes")


def _flags(args) -> Flags:
    return Flags(args.order, args.dmax, args.guardrail, args.oracle, args.witness_verify, args.timing, args.parallel)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gts", description="Check the canonical map from divided powers "
                                                         "to symmetric tensors on presented modules.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a .gts script")
    r.add_argument("file")
    _add_flags(r)
    c = sub.add_parser("corpus", help="run built-in examples against pinned verdicts")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true")
    g.add_argument("--case", action="append", metavar="ID")
    c.add_argument("--list", action="store_true", help="list cases instead of running them")
    _add_flags(c)
    return ap


def cmd_run(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        print(f"gts: {exc}", file=sys.stderr)
        return 2
    try:
        script = parse(source)
    except ScriptError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return 2
    report = run_script(script, _flags(args), args.file)
    sys.stdout.write(render_json(report) if args.json else render_text(report))
    return report.exit_code


def cmd_corpus(args) -> int:
    cases = load_manifest()
    try:
        chosen = select(cases, args.all or (args.list and not args.case), args.case)
    except SelectionError as exc:
        print(f"gts: {exc}", file=sys.stderr)
        return 2
    if args.list:
        for c in chosen:
            print(f"{c.id:8} {c.file:14} {c.citation}")
        return 0
    base = _flags(args)
    outcomes = [run_case(c, replace(base, oracle=base.oracle or c.oracle)) for c in chosen]
    if args.json:
        print(json.dumps({"schema": 1, "cases": [o.to_dict() for o in outcomes]}, indent=2, ensure_ascii=False))
    else:
        for o in outcomes:
            print(f"== {o.case.id} ({o.case.citation})")
            sys.stdout.write(render_text(o.report))
            for f in o.failures:
                print(f"  pin mismatch: {f}")
        print()
        print(f"{'case':8} {'pins':>5}  result")
        for o in outcomes:
            print(f"{o.case.id:8} {len(o.case.pins):>5}  {'match' if o.matched else 'MISMATCH'}")
    if any(o.report.errors for o in outcomes):
        return 2
    return 0 if all(o.matched for o in outcomes) else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return cmd_corpus(args)


if __name__ == "__main__":
    sys.exit(main())
