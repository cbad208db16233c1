"""Command-line front end.

Exit codes: 0 success, 1 invariant or check failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .core import InvalidInstance, SchedError, fmt, rational, validate_instance
from .engine import simulate
from .generators import BadSpec, RandomSpec, gen_example1, gen_example2, gen_random
from .harness import SWEEP_COLUMNS, SweepSpec, run_check, run_sweep, sweep_csv
from .oracle import TooLarge, Unbounded, competitive_ratio, oracle_cap, optimal_nonmigratory
from .policies import parse_policy
from .serialize import (FormatError, dumps, dumps_instance, dumps_outcome, loads_instance,
                        oracle_to_dict, trace_csv)

log = logging.getLogger("slacksched")

OK, FAILED, BAD_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return rational(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _frac_list(text: str) -> list[Fraction]:
    return [_frac(x) for x in text.split(",") if x.strip()]


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    try:
        return loads_instance(text)
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}")


def _load_valid(path: str):
    inst = _load(path)
    report = validate_instance(inst)
    if not report.ok:
        raise UsageError(f"{path}: invalid instance\n" +
                         "\n".join(f"  {v}" for v in report.violations))
    return inst


def cmd_validate(args) -> int:
    inst = _load(args.instance)
    report = validate_instance(inst)
    if args.format == "json":
        _emit(dumps({"valid": report.ok, "violations": [str(v) for v in report.violations]}),
              args.out)
    else:
        lines = [str(v) for v in report.violations] or ["valid"]
        _emit("\n".join(lines) + "\n", args.out)
    return OK if report.ok else BAD_INPUT


def cmd_gen(args) -> int:
    if args.kind == "example1":
        inst = gen_example1(args.eps, args.gamma, args.delta, args.n)
    elif args.kind == "example2":
        inst = gen_example2(args.eps, args.gamma, args.delta)
    else:
        spec = RandomSpec(seed=args.seed or 0, n=args.n, m=args.m, eps=args.eps,
                          size=tuple(args.size), weight=tuple(args.weight),
                          stretch=tuple(args.stretch), horizon=args.horizon)
        inst = gen_random(spec)
    _emit(dumps_instance(inst), args.out)
    return OK


def cmd_simulate(args) -> int:
    inst = _load_valid(args.instance)
    policy = parse_policy(args.policy, inst.epsilon)
    out = simulate(inst, policy)
    if args.trace:
        Path(args.trace).write_text(trace_csv(out))
    if args.format == "csv":
        _emit(trace_csv(out), args.out)
    else:
        _emit(dumps_outcome(out), args.out)
    return OK


def cmd_oracle(args) -> int:
    inst = _load_valid(args.instance)
    res = optimal_nonmigratory(inst, args.cap)
    _emit(dumps(oracle_to_dict(res)), args.out)
    return OK


def cmd_ratio(args) -> int:
    inst = _load_valid(args.instance)
    policy = parse_policy(args.policy, inst.epsilon)
    ratio = competitive_ratio(inst, policy, args.cap)
    text = str(ratio) if ratio is Unbounded else fmt(ratio)
    if args.format == "json":
        _emit(dumps({"policy": policy.name, "ratio": text}), args.out)
    else:
        _emit(text + "\n", args.out)
    return OK


def cmd_sweep(args) -> int:
    if args.gamma is not None and args.gamma_scale is not None:
        raise UsageError("--gamma and --gamma-scale are mutually exclusive")
    first = args.seed or 0
    spec = SweepSpec(
        generator=args.generator, eps_grid=tuple(args.eps), policies=tuple(args.policies),
        gamma=args.gamma, gamma_scale=args.gamma_scale or Fraction(1), delta=args.delta,
        n=args.n, m=args.m, seeds=tuple(range(first, first + args.seeds)),
        oracle_cap=args.cap or oracle_cap())
    rows = run_sweep(spec, workers=args.workers)
    if args.format == "json":
        _emit(dumps([{k: fmt(row[k]) if isinstance(row[k], Fraction) else row[k]
                      for k in SWEEP_COLUMNS} for row in rows]), args.out)
    else:
        _emit(sweep_csv(rows), args.out)
    return OK


def cmd_check(args) -> int:
    report = run_check(seeds=args.seeds, oracle_n=args.oracle_n, max_n=args.max_n,
                       first_seed=args.seed or 0)
    if args.format == "json":
        _emit(dumps({r.name: {"passed": r.passed, "checked": r.checked, "failures": r.failures}
                     for r in report.results.values()}), args.out)
    else:
        _emit("\n".join(report.lines()) + "\n", args.out)
    return OK if report.passed else FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", "-o", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="slacksched", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", "-o", default=None)
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check an instance file")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", parents=[common], help="write a generated instance")
    p.add_argument("kind", choices=("example1", "example2", "random"))
    p.add_argument("--eps", type=_frac, default=Fraction(1, 2))
    p.add_argument("--gamma", type=_frac, default=None)
    p.add_argument("--delta", type=_frac, default=None)
    p.add_argument("-n", type=int, default=None)
    p.add_argument("-m", type=int, default=1)
    p.add_argument("--size", type=_frac, nargs=2, default=[Fraction(1), Fraction(8)])
    p.add_argument("--weight", type=_frac, nargs=2, default=[Fraction(1), Fraction(16)])
    p.add_argument("--stretch", type=_frac, nargs=2, default=[Fraction(1), Fraction(2)])
    p.add_argument("--horizon", type=_frac, default=Fraction(20))
    p.set_defaults(func=cmd_gen)

    for name, func, helptext in (("simulate", cmd_simulate, "run a policy on an instance"),
                                 ("ratio", cmd_ratio, "optimum over policy's finished weight")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("instance")
        p.add_argument("--policy", default="two-threshold",
                       help="two-threshold | single-threshold:<gamma>")
        if name == "simulate":
            p.add_argument("--trace", help="write the segment trace CSV here")
        else:
            p.add_argument("--cap", type=int, default=None)
        p.set_defaults(func=func)

    p = sub.add_parser("oracle", parents=[common], help="exact non-migratory optimum")
    p.add_argument("instance")
    p.add_argument("--cap", type=int, default=None, help="job cap (default $SCHED_ORACLE_CAP or 12)")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", parents=[common], help="ratio sweep over an epsilon grid")
    p.add_argument("--generator", choices=("example1", "example2", "random"), default="example2")
    p.add_argument("--eps", type=_frac_list, default=[Fraction(1), Fraction(1, 2),
                                                      Fraction(1, 4), Fraction(1, 8)])
    p.add_argument("--gamma", type=_frac, default=None)
    p.add_argument("--gamma-scale", type=_frac, default=None, help="gamma = min(1, scale*eps)")
    p.add_argument("--delta", type=_frac, default=None)
    p.add_argument("--policies", type=lambda s: s.split(","),
                   default=["two-threshold", "single-threshold"])
    p.add_argument("-n", type=int, default=4)
    p.add_argument("-m", type=int, default=1)
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", parents=[common], help="run the invariant suite")
    p.add_argument("--seeds", type=int, default=200)
    p.add_argument("--oracle-n", type=int, default=8)
    p.add_argument("--max-n", type=int, default=20)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "gen":
        if args.kind != "random" and args.gamma is None:
            print("slacksched: --gamma is required for example generators", file=sys.stderr)
            return BAD_INPUT
        if args.n is None:
            args.n = 1 if args.kind == "example1" else 10
    try:
        return args.func(args)
    except (UsageError, InvalidInstance, FormatError, BadSpec, TooLarge, ValueError) as exc:
        print(f"slacksched: {exc}", file=sys.stderr)
        return BAD_INPUT
    except SchedError as exc:
        print(f"slacksched: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
