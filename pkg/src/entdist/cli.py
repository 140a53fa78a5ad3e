"""Deterministic command-line front end.

Commands emit CSV or plain text that is byte-identical across runs and
platforms for identical arguments: fixed 6-decimal formatting, fixed row
order, LF line endings, no locale dependence.  ``--p`` and ``--alpha2``
accept exact fractions ("2/3") as well as decimals.

Exit codes: 0 success, 1 internal numeric diagnostic, 2 argument error.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .channel import OracleConvergenceError, q2_lower_bound, ree_upper_bound
from .montecarlo import estimate_rate
from .rates import (
    bisection_only_rate,
    extract_policy,
    protocol_rate,
    protocol_rate_exact,
    raw_hashing_rate,
)
from .recurrence import improved_recurrence_rate, original_two_copy_rate
from .states import SourceState


def _probability(text: str) -> Fraction:
    """Parse "2/3" or a decimal into an exact Fraction in [0, 1]."""
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}") from exc
    if value < 0 or value > 1:
        raise argparse.ArgumentTypeError(f"{text} outside [0, 1]")
    return value


def _block_size(text: str) -> int:
    try:
        n = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if n < 2 or n & (n - 1):
        raise argparse.ArgumentTypeError(f"block size must be a power of two >= 2, got {n}")
    if n > 128:
        raise argparse.ArgumentTypeError(f"block size capped at 128, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entdist",
        description="Distillation rates for mixtures of a pure entangled state "
                    "and an orthogonal product state.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="PATH", default=None,
                        help="write output to PATH instead of stdout")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="bound on internal parallelism (default: all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser(
        "table1", parents=[common],
        help="CSV of protocol rate R and bisection-only rate R' vs block size")
    p_table.add_argument("--p", type=_probability, default=Fraction(2, 3))
    p_table.add_argument("--max-n", type=_block_size, default=64)

    p_fig = sub.add_parser(
        "figure1", parents=[common],
        help="CSV of rate and bound curves on a uniform open p-grid")
    p_fig.add_argument("--n", type=_block_size, default=64)
    p_fig.add_argument("--grid", type=int, default=19,
                       help="number of interior grid points (>= 3)")

    p_rate = sub.add_parser("rate", parents=[common],
                            help="protocol rate for one source state")
    p_rate.add_argument("--p", type=_probability, required=True)
    p_rate.add_argument("--alpha2", type=_probability, default=Fraction(1, 2))
    p_rate.add_argument("--n", type=_block_size, default=64)
    p_rate.add_argument("--no-hashing", action="store_true",
                        help="disable the hashing branch (bisection only)")
    p_rate.add_argument("--exact", action="store_true",
                        help="exact rational outcome weights (n <= 16)")

    p_pol = sub.add_parser("policy", parents=[common],
                           help="decision table of the measurement cascade")
    p_pol.add_argument("--p", type=_probability, required=True)
    p_pol.add_argument("--alpha2", type=_probability, default=Fraction(1, 2))
    p_pol.add_argument("--n", type=_block_size, default=64)
    p_pol.add_argument("--no-hashing", action="store_true")

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="Monte Carlo estimate of the protocol rate")
    p_sim.add_argument("--p", type=_probability, required=True)
    p_sim.add_argument("--alpha2", type=_probability, default=Fraction(1, 2))
    p_sim.add_argument("--n", type=_block_size, default=16)
    p_sim.add_argument("--trials", type=int, default=100_000)
    p_sim.add_argument("--seed", type=int, default=0)

    p_q2 = sub.add_parser(
        "q2", parents=[common],
        help="two-way capacity lower bound of the amplitude damping channel")
    p_q2.add_argument("--gamma", type=_probability, required=True,
                      help="damping amplitude (decay probability gamma^2)")
    p_q2.add_argument("--n", type=_block_size, default=32)

    return parser


def _cmd_table1(args) -> str:
    p = float(args.p)
    lines = ["n,R,R_prime"]
    n = 2
    while n <= args.max_n:
        source = SourceState(p)
        lines.append(f"{n},{protocol_rate(source, n):.6f},"
                     f"{bisection_only_rate(source, n):.6f}")
        n *= 2
    return "\n".join(lines) + "\n"


def _cmd_figure1(args) -> str:
    if args.grid < 3:
        raise ValueError(f"grid must have at least 3 points, got {args.grid}")
    lines = ["p,coherent_info,ree,bennett_oneshot,bennett_iterated,ours"]
    for i in range(1, args.grid + 1):
        p = i / (args.grid + 1)
        lines.append(",".join((
            f"{p:.6f}",
            f"{raw_hashing_rate(p):.6f}",
            f"{ree_upper_bound(p):.6f}",
            f"{original_two_copy_rate(p):.6f}",
            f"{improved_recurrence_rate(p):.6f}",
            f"{protocol_rate(SourceState(p), args.n):.6f}",
        )))
    return "\n".join(lines) + "\n"


def _cmd_rate(args) -> str:
    if args.exact:
        value = protocol_rate_exact(args.p, args.alpha2, args.n,
                                    use_hashing=not args.no_hashing)
    else:
        source = SourceState(float(args.p), float(args.alpha2))
        fn = bisection_only_rate if args.no_hashing else protocol_rate
        value = fn(source, args.n)
    return f"{value:.6f}\n"


def _cmd_policy(args) -> str:
    source = SourceState(float(args.p), float(args.alpha2))
    lines = ["level,a,b,decision,rate"]
    for entry in extract_policy(source, args.n, use_hashing=not args.no_hashing):
        o = entry.outcome
        lines.append(f"{o.n},{o.a},{o.b},{entry.decision.value},{entry.rate:.6f}")
    return "\n".join(lines) + "\n"


def _cmd_simulate(args) -> str:
    source = SourceState(float(args.p), float(args.alpha2))
    report = estimate_rate(source, args.n, args.trials, args.seed,
                           threads=max(args.threads, 1))
    return (f"mean={report.mean:.6f} stderr={report.stderr:.6f} "
            f"trials={report.trials} seed={report.seed}\n")


def _cmd_q2(args) -> str:
    point = q2_lower_bound(float(args.gamma), args.n)
    return (f"gamma={point.gamma:.6f} n={args.n} "
            f"best_alpha2={point.best_alpha2:.6f} rate={point.rate:.6f}\n")


_HANDLERS = {
    "table1": _cmd_table1,
    "figure1": _cmd_figure1,
    "rate": _cmd_rate,
    "policy": _cmd_policy,
    "simulate": _cmd_simulate,
    "q2": _cmd_q2,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = _HANDLERS[args.command](args)
    except OracleConvergenceError as exc:
        print(f"entdist: numeric diagnostic: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"entdist: error: {exc}", file=sys.stderr)
        return 2
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="\n") as handle:
            handle.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
