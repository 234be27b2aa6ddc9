"""Command line: plan, sweep, verify, converse, split, recover.

Exit codes: 0 ok, 1 usage or input error, 2 insufficient shares,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from math import lcm
from pathlib import Path

from . import converse, oracle, planner, sharefile
from .errors import InsufficientSharesError, LkssError
from .field import DEFAULT_MODULUS, PrimeField
from .leaky import SchemeParams, SeededSource, SystemRandomSource, parse_rational

EXIT_OK, EXIT_USAGE, EXIT_INSUFFICIENT, EXIT_VERIFY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except LkssError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _scheme_args(p: argparse.ArgumentParser, *, q_default: int = DEFAULT_MODULUS) -> None:
    p.add_argument("-T", type=int, required=True, help="number of servers")
    p.add_argument("--tau", type=int, required=True, help="reconstruction threshold")
    p.add_argument("-z", type=int, required=True, help="privacy threshold")
    p.add_argument("--alpha", type=_rational, required=True, help="leakage fraction, e.g. 1/4")
    p.add_argument("-q", type=int, default=q_default, help=f"prime field size (default {q_default})")


def _params(args) -> SchemeParams:
    return SchemeParams(args.T, args.tau, args.z, args.alpha, PrimeField(args.q))


def cmd_plan(args) -> int:
    print(planner.plan(_params(args)).describe())
    return EXIT_OK


def cmd_sweep(args) -> int:
    z_max = args.z_max if args.z_max is not None else args.tau - 1
    grid = planner.default_alpha_grid(args.tau, args.alpha_den)
    rows = planner.sweep(args.T, args.tau, range(args.z_min, z_max + 1), grid)
    text = planner.sweep_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = oracle.check_scheme(_params(args))
    print(report.to_text())
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return EXIT_OK if report.ok else EXIT_VERIFY


def _default_grid(z: int, tau: int, alpha: Fraction) -> int:
    return lcm(alpha.denominator * (tau - z), tau)


def cmd_converse(args) -> int:
    D = args.D or _default_grid(args.z, args.tau, args.alpha)
    cert = converse.theorem1_certificate(args.z, args.tau, args.alpha, D)
    arg = lambda g: "[" + ", ".join(_fmt(v) for v in g.values) + "]"  # noqa: E731
    print(f"grid 1/{D}, z={args.z} tau={args.tau} alpha={_fmt(args.alpha)}")
    print(f"privacy branch:   min = {_fmt(cert.privacy_min)}  bound (1-alpha)/(tau-z) = {_fmt(cert.privacy_bound)}")
    print(f"  argmin phi on [{args.z}, {args.tau + 1}] = {arg(cert.privacy_argmin)}")
    print(f"threshold branch: min = {_fmt(cert.threshold_min)}  bound 1/tau = {_fmt(cert.threshold_bound)}")
    print(f"  argmin phi on [0, {args.tau + 1}] = {arg(cert.threshold_argmin)}")
    print(f"lower bound max(...) = {_fmt(cert.bound)}")
    print("PASS" if cert.holds else "FAIL")
    return EXIT_OK if cert.holds else EXIT_VERIFY


def cmd_split(args) -> int:
    params = _params(args)
    if args.seed is not None:
        if not args.insecure_seed_ok:
            raise _UsageError("--seed makes the shares predictable; add --insecure-seed-ok to accept that")
        source = SeededSource(params.q, args.seed)
        scheme_id = SeededSource(256, args.seed ^ 0x5EED).take(16).astype("u1").tobytes()
    else:
        source = SystemRandomSource(params.q)
        scheme_id = None
    data = Path(args.input).read_bytes()
    bundles = sharefile.split_bytes(data, params, source, scheme_id=scheme_id)
    for path in sharefile.write_shares(bundles, Path(args.out_dir)):
        print(path)
    return EXIT_OK


def cmd_recover(args) -> int:
    bundles = sharefile.read_shares(args.shares)
    Path(args.output).write_bytes(sharefile.recover_bytes(bundles))
    return EXIT_OK


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lkss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="optimal share size and randomness for one parameter set")
    _scheme_args(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("sweep", help="CSV of optimal ratios over z and an alpha grid")
    p.add_argument("-T", type=int, required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--z-min", type=int, default=1)
    p.add_argument("--z-max", type=int, default=None, help="default tau - 1")
    p.add_argument("--alpha-den", type=int, default=None, help="alpha grid k/den, default den = 4*tau")
    p.add_argument("-o", "--output", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="scan all server subsets of the built scheme")
    _scheme_args(p)
    p.add_argument("--csv", help="also write per-subset results as CSV")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("converse", help="exhaustive grid check of the share-size lower bound")
    p.add_argument("-z", type=int, required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--alpha", type=_rational, required=True)
    p.add_argument("-D", type=int, default=None, help="grid denominator (default fits the optimum)")
    p.set_defaults(func=cmd_converse)

    p = sub.add_parser("split", help="split a file into T share files")
    p.add_argument("input")
    _scheme_args(p)
    p.add_argument("-o", "--out-dir", required=True)
    p.add_argument("--seed", type=int, default=None, help="deterministic randomness (testing only)")
    p.add_argument("--insecure-seed-ok", action="store_true")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("recover", help="rebuild the file from at least tau share files")
    p.add_argument("shares", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_recover)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InsufficientSharesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except (LkssError, _UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
