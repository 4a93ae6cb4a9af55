"""Command-line front end: `break` preprocesses a DIMACS file, `gen`
writes benchmark instances."""

from __future__ import annotations

import argparse
import json
import sys

from .cnf import DimacsError, emit_dimacs, parse_dimacs
from .pipeline import PipelineConfig, run
from .testkit import gen_cliquecolor, gen_php, gen_ramsey


def _read_input(path: str):
    if path == "-":
        return sys.stdin.read()
    with open(path, "r") as fh:
        return fh.read()


def _write_output(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symbreak",
        description="Static symmetry breaking preprocessor for CNF-SAT.")
    sub = parser.add_subparsers(dest="command", required=True)

    br = sub.add_parser("break", help="add symmetry breaking clauses")
    br.add_argument("input", help="input DIMACS file, or - for stdin")
    br.add_argument("-o", "--output", default="-",
                    help="output DIMACS file, or - for stdout (default)")
    br.add_argument("--no-johnson", action="store_true")
    br.add_argument("--no-row-column", action="store_true")
    br.add_argument("--no-row", action="store_true")
    br.add_argument("--no-binary", action="store_true")
    br.add_argument("--no-remainder", action="store_true")
    br.add_argument("--max-len", type=int, default=64,
                    help="max positions per lex chain (default 64)")
    br.add_argument("--dive-pairs", type=int, default=32,
                    help="remainder search budget (default 32)")
    br.add_argument("--seed", type=int, default=0)
    br.add_argument("--stats", metavar="PATH",
                    help="write a stats JSON report")
    br.add_argument("--verify-level", choices=["structures", "all-emitted"],
                    default="structures")

    gen = sub.add_parser("gen", help="generate a benchmark instance")
    gen.add_argument("family", choices=["php", "ramsey", "cliquecolor"])
    gen.add_argument("params", type=int, nargs="+",
                     help="php: n [m] | ramsey: k s n | cliquecolor: n k c")
    gen.add_argument("-o", "--output", default="-")
    return parser


def _cmd_break(args) -> int:
    if args.max_len < 0 or args.dive_pairs < 0:
        print("error: numeric parameters must be non-negative",
              file=sys.stderr)
        return 1
    try:
        text = _read_input(args.input)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        formula = parse_dimacs(text)
    except DimacsError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    config = PipelineConfig(
        johnson=not args.no_johnson,
        row_column=not args.no_row_column,
        row=not args.no_row,
        binary=not args.no_binary,
        remainder=not args.no_remainder,
        max_len=args.max_len,
        dive_pairs=args.dive_pairs,
        seed=args.seed,
        verify_level=args.verify_level,
    )
    out = run(formula, config)
    comments = ["static symmetry breaking preprocessor"]
    for s in out.stats["structures"]:
        dims = "x".join(str(d) for d in s["dims"])
        comments.append(
            f"structure {s['kind']} dims {dims} generators {s['generators']}")
    comments.append(
        "remainder generators {generators} binary clauses {binary_clauses}"
        .format(**out.stats["remainder"]))
    comments.append(f"added {out.stats['clauses_added']} clauses, "
                    f"{out.aux_count} auxiliary variables, seed {args.seed}")
    text = emit_dimacs(formula, added=out.added_clauses,
                       aux_vars=out.aux_count, comments=comments)
    _write_output(args.output, text)
    if args.stats:
        _write_output(args.stats, json.dumps(out.stats, indent=2) + "\n")
    return 0


def _cmd_gen(args) -> int:
    family, params = args.family, args.params
    try:
        if family == "php":
            if len(params) not in (1, 2):
                raise ValueError("php takes n [m]")
            formula = gen_php(*params)
        elif family == "ramsey":
            if len(params) != 3:
                raise ValueError("ramsey takes k s n")
            formula = gen_ramsey(*params)
        else:
            if len(params) != 3:
                raise ValueError("cliquecolor takes n k c")
            formula = gen_cliquecolor(*params)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_output(args.output, emit_dimacs(formula))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; --help exits 0
        return 0 if exc.code == 0 else 1
    if args.command == "break":
        return _cmd_break(args)
    return _cmd_gen(args)


if __name__ == "__main__":
    sys.exit(main())
