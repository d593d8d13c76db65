"""Command-line front end.

Exit codes: 0 success, 1 parse or type error, 2 stuck, 3 out of fuel,
4 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .dynamics import evaluate
from .parser import ParseError, Program, parse_program, parse_ty, pretty_program
from .pretty import pretty_tm, pretty_ty
from .soundness_harness import run_selftest, storecontext_check, write_report
from .subtype import derive
from .typing import TypeCheckError, synthesize

EXIT_OK, EXIT_ERROR, EXIT_STUCK, EXIT_FUEL, EXIT_SELFTEST = 0, 1, 2, 3, 4


def _load(path: str) -> Program:
    if path == "-":
        return parse_program(sys.stdin.read())
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


def _parse_or_report(path: str) -> Optional[Program]:
    try:
        prog = _load(path)
    except ParseError as err:
        print(f"ParseError: {err}", file=sys.stderr)
        return None
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return None
    if not storecontext_check(prog.sigma, prog.store):
        print("error: tag declarations do not form a valid hierarchy", file=sys.stderr)
        return None
    return prog


def cmd_parse(args) -> int:
    prog = _parse_or_report(args.file)
    if prog is None:
        return EXIT_ERROR
    print(pretty_program(prog))
    return EXIT_OK


def cmd_typecheck(args) -> int:
    prog = _parse_or_report(args.file)
    if prog is None:
        return EXIT_ERROR
    try:
        T = synthesize({}, prog.sigma, prog.main)
    except TypeCheckError as err:
        print(f"TypeError: {err.render(pretty_ty)}", file=sys.stderr)
        return EXIT_ERROR
    print(pretty_ty(T))
    return EXIT_OK


def _store_json(S) -> dict:
    return {"entries": [list(p) for p in S.entries], "next_id": S.next_id}


def cmd_eval(args) -> int:
    prog = _parse_or_report(args.file)
    if prog is None:
        return EXIT_ERROR
    T = None
    if not args.no_check:
        try:
            T = synthesize({}, prog.sigma, prog.main)
        except TypeCheckError as err:
            print(f"TypeError: {err.render(pretty_ty)}", file=sys.stderr)
            return EXIT_ERROR
    run = evaluate(prog.store, prog.main, args.fuel)
    code = {"Value": EXIT_OK, "Stuck": EXIT_STUCK, "OutOfFuel": EXIT_FUEL}[run.status]

    if args.json:
        out = {
            "status": run.status,
            "steps": run.steps,
            "type": None if T is None else pretty_ty(T),
            "term": pretty_tm(run.term),
            "store": _store_json(run.store),
        }
        if run.reason:
            out["reason"] = run.reason
        if args.trace:
            out["trace"] = [{"rule": r, "term": pretty_tm(e)} for r, e, _ in run.trace]
        print(json.dumps(out, sort_keys=True))
        return code

    if args.trace:
        print(f"0: start  e := {pretty_tm(prog.main)}  store := {prog.store.inline()}")
        prev = prog.store
        for k, (rule, e, S) in enumerate(run.trace, 1):
            line = f"{k}: {rule}  e := {pretty_tm(e)}"
            if S != prev:
                line += f"  store := {S.inline()}"
            print(line)
            prev = S
    if run.status == "Stuck":
        print(f"stuck: {run.reason}", file=sys.stderr)
    elif run.status == "OutOfFuel":
        print(f"out of fuel after {run.steps} steps", file=sys.stderr)
    print(f"result: {pretty_tm(run.term)}")
    print("store:")
    print(run.store.dump())
    return code


def cmd_subtype(args) -> int:
    try:
        lhs, rhs = parse_ty(args.lhs), parse_ty(args.rhs)
        prog = parse_program(open(args.decls).read() + "\n< >") if args.decls else None
    except (ParseError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR
    sigma = prog.sigma if prog else {}
    tree = derive(lhs, rhs, {}, sigma)
    if tree is None:
        print(f"{pretty_ty(lhs)} is not a subtype of {pretty_ty(rhs)}")
        return EXIT_ERROR
    print(tree.render(pretty_ty))
    return EXIT_OK


def cmd_selftest(args) -> int:
    result = run_selftest(args.cases, args.seed, args.fuel, args.depth, args.subtype_depth)
    print(result.text)
    if args.report:
        write_report(args.report, result)
    return EXIT_OK if result.ok else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toto", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a program and pretty-print it")
    p.add_argument("file")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("typecheck", help="print the synthesized type of a program")
    p.add_argument("file")
    p.set_defaults(run=cmd_typecheck)

    p = sub.add_parser("eval", help="evaluate a program")
    p.add_argument("file")
    p.add_argument("--trace", action="store_true", help="print every step")
    p.add_argument("--fuel", type=int, default=10000, help="maximum number of steps (default 10000)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--no-check", action="store_true", help="skip typechecking")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("subtype", help="show a subtyping derivation")
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.add_argument("--decls", help="file of tag declarations")
    p.set_defaults(run=cmd_subtype)

    p = sub.add_parser("selftest", help="differential subtyping, progress and preservation suites")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fuel", type=int, default=200)
    p.add_argument("--depth", type=int, default=4, help="generator depth")
    p.add_argument("--subtype-depth", type=int, default=3, help="depth of the enumerated type universe")
    p.add_argument("--report", help="write one JSON record per case to this file")
    p.set_defaults(run=cmd_selftest)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
