"""
Command-line interface.

    underlying-states check <file>
    underlying-states model <file> --out <file>
    underlying-states witness <file>
    underlying-states demo wave --modes <n>
    underlying-states gen random --dim <d> --count <k> --compatible <bool> --seed <s>

Global flags (before or after the subcommand): --tol-compat, --tol-model,
--states, --format text|structured.

Exit status: 0 compatible and verified, 1 incompatible (witness emitted),
2 input error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .compatibility import scenario_pairwise_check
from .errors import UnderlyingStatesError
from .model import dump_model
from .runner import (STATUS_INCOMPATIBLE, STATUS_INPUT_ERROR, render_structured, render_text,
                     run_check)
from .scenario import dump_scenario, generate_random_scenario, generate_wave_demo, load_scenario


def _bool(text: str) -> bool:
    t = text.lower()
    if t in ("true", "1", "yes", "y"):
        return True
    if t in ("false", "0", "no", "n"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _add_globals(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--tol-compat", type=_positive_float, default=d(None),
                   help="compatibility tolerance (default 1e-8)")
    p.add_argument("--tol-model", type=_positive_float, default=d(None),
                   help="model verification tolerance (default 1e-9)")
    p.add_argument("--states", type=int, default=d(None),
                   help="number of random probe states (default 50)")
    p.add_argument("--format", choices=("text", "structured"), default=d("text"))
    p.add_argument("--no-timing", action="store_true", default=d(False),
                   help="omit timing fields from structured output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="underlying-states",
        description="Check compatibility of observables and build state-updating "
                    "underlying-state models.")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        _add_globals(p, suppress=True)
        return p

    p = add("check", help="decide compatibility and verify the model or emit a witness")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=None)

    p = add("model", help="build the model and write it to a file")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)

    p = add("witness", help="print an order-dependence witness, if one exists")
    p.add_argument("file")

    p = add("demo", help="built-in demonstrations")
    demo = p.add_subparsers(dest="demo", required=True)
    w = demo.add_parser("wave", help="standing vs travelling waves on a string")
    _add_globals(w, suppress=True)
    w.add_argument("--modes", type=int, required=True)

    p = add("gen", help="generate scenario documents")
    gen = p.add_subparsers(dest="gen", required=True)
    r = gen.add_parser("random", help="random scenario")
    _add_globals(r, suppress=True)
    r.add_argument("--dim", type=int, required=True)
    r.add_argument("--count", type=int, required=True)
    r.add_argument("--compatible", type=_bool, required=True)
    r.add_argument("--seed", type=int, required=True)
    r.add_argument("--out", default=None)
    return parser


def _emit(report, args, out):
    if args.format == "structured":
        out.write(render_structured(report, timing=not args.no_timing) + "\n")
    else:
        out.write(render_text(report) + "\n")


def _run(args, out) -> int:
    if args.command == "gen":
        scenario = generate_random_scenario(args.dim, args.count, args.compatible, args.seed)
        text = dump_scenario(scenario) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            out.write(text)
        return 0

    if args.command == "demo":
        scenario = generate_wave_demo(args.modes)
    else:
        scenario = load_scenario(args.file)

    if args.command == "witness":
        tol = args.tol_compat or scenario.options.tol_compat
        compat = scenario_pairwise_check(scenario, tol)
        if compat.compatible:
            out.write("all pairs compatible; no witness\n")
            return 0
        if args.format == "structured":
            out.write(json.dumps(compat.witness.to_dict(), indent=2, sort_keys=True) + "\n")
        else:
            w = compat.witness
            out.write(f"{w.pair[0]}={w.values[0]:g}, {w.pair[1]}={w.values[1]:g}: "
                      f"p_ab={w.p_ab:.12g} p_ba={w.p_ba:.12g} violation={w.violation:.12g}\n")
        return STATUS_INCOMPATIBLE

    report = run_check(scenario, n_states=args.states, seed=getattr(args, "seed", None),
                       tol_compat=args.tol_compat, tol_model=args.tol_model)
    if args.command == "model" and report.model is not None:
        Path(args.out).write_text(dump_model(report.model) + "\n")
    _emit(report, args, out)
    return report.status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args, sys.stdout)
    except (UnderlyingStatesError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return STATUS_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
