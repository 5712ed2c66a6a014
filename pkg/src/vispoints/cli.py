"""Command-line surface: counting, error tables, certificates, scans.

Exit codes: 0 success (or certificate passes), 1 certified failure,
2 capacity/budget exceeded, 64 usage error.  Output on stdout is
byte-identical for identical flags regardless of thread count.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from math import floor
from pathlib import Path
from typing import Optional, Sequence

from .analysis import (
    certify_witness_bound,
    error_scan,
    format_rational,
    negativity_failures,
    witness_scan,
    write_error_csv,
    zeta_gap_ok,
)
from .arith import (
    CapacityError,
    MobiusTable,
    build_mobius_table,
    load_mobius_cache,
    save_mobius_cache,
)
from .visibility import (
    BudgetError,
    CountQuery,
    jordan_summatory,
    umbral_evaluate,
    umbral_polynomial,
    visible_count,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CAPACITY = 2
EXIT_USAGE = 64

WITNESS_CSV_HEADER = "m,r,k,S,V,E_lo,E_hi,E_norm_lo,E_norm_hi"


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for
    # capacity problems and uses 64 for usage.
    def error(self, message: str):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _nonneg_radius(text: str) -> int:
    # Real radii are accepted and floored; the count changes only at integers.
    value = floor(Fraction(text))
    if value < 0:
        raise argparse.ArgumentTypeError(f"radius must be >= 0, got {text}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(piece) for piece in text.split(",") if piece != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def _resolve_threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("VISPOINTS_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"VISPOINTS_THREADS must be an integer, got {env!r}")
        if value < 1:
            raise ValueError(f"VISPOINTS_THREADS must be >= 1, got {env!r}")
        return value
    return os.cpu_count() or 1


def _load_or_build_mobius(limit: int, cache_dir: Path) -> MobiusTable:
    # Opt-in cache: a valid file is reused, anything unreadable or stale
    # is silently rebuilt and replaced.  Correctness never depends on it.
    path = cache_dir / f"mobius-{limit}.vpmu"
    if path.is_file():
        try:
            with open(path, "rb") as fh:
                table = load_mobius_cache(fh)
            if table.limit >= limit:
                return table
        except (ValueError, OSError):
            pass
    table = build_mobius_table(limit)
    cache_dir.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            save_mobius_cache(table, fh)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return table


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads (default: VISPOINTS_THREADS or cpu count)")
    common.add_argument("--cache-dir", type=Path, default=None,
                        help="directory for the Mobius sieve cache (optional)")

    parser = _Parser(prog="vispoints",
                     description="Exact visible-point counts and certified error terms.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", parents=[common], help="count visible points in [-r, r]^m")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--radius", type=_nonneg_radius, required=True)
    p.add_argument("--method", choices=("brute", "umbral", "orthant", "diff"),
                   default="umbral")

    p = sub.add_parser("error", parents=[common], help="CSV table of error terms")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--from", dest="r_from", type=_positive_int, required=True)
    p.add_argument("--to", dest="r_to", type=_positive_int, required=True)
    p.add_argument("--step", type=_positive_int, default=1)
    p.add_argument("--out", type=Path, default=None, help="CSV path (default stdout)")

    p = sub.add_parser("certify", parents=[common],
                       help="JSON certificate of the witness-radius bound")
    p.add_argument("--dim", type=int, choices=(2, 3), required=True)
    p.add_argument("--cutoff", type=_positive_int, default=100)

    p = sub.add_parser("negcheck", parents=[common],
                       help="dimension >= 4 negativity: zeta gap plus odd-radius scan")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--r-max", dest="r_max", type=_positive_int, required=True)

    p = sub.add_parser("witness", parents=[common],
                       help="scan the witness family r = k * product(primes)")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--primes", type=_int_list, default=[3, 5, 7, 11, 13])
    p.add_argument("--k", type=_int_list, default=[1])
    p.add_argument("--cap", type=_positive_int, default=10**6)

    return parser


def _cmd_count(args: argparse.Namespace) -> int:
    query = CountQuery(args.dim, args.radius)
    if args.cache_dir is not None and args.method == "umbral" and query.radius >= 1:
        mobius = _load_or_build_mobius(query.radius, args.cache_dir)
        value = umbral_evaluate(
            umbral_polynomial(query.dimension),
            query.radius,
            lambda order, r: jordan_summatory(order, r, "mobius_faulhaber", mobius),
        )
    else:
        value = visible_count(query.dimension, query.radius, args.method)
    print(value)
    print(f"method: {args.method}", file=sys.stderr)
    return EXIT_OK


def _cmd_error(args: argparse.Namespace) -> int:
    rows = error_scan(args.dim, args.r_from, args.r_to, args.step,
                      threads=_resolve_threads(args))
    if args.out is None:
        write_error_csv(rows, sys.stdout)
        return EXIT_OK
    # Rows are complete before the file appears, and the write goes
    # through a temp name, so no partial CSV can be left behind.
    parent = args.out.resolve().parent
    fd, tmp_name = tempfile.mkstemp(dir=parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            write_error_csv(rows, fh)
        os.replace(tmp_name, args.out)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return EXIT_OK


def _cmd_certify(args: argparse.Namespace) -> int:
    certificate = certify_witness_bound(args.dim, args.cutoff)
    print(json.dumps(certificate.to_json_dict(), indent=2))
    return EXIT_OK if certificate.passes else EXIT_FAIL


def _cmd_negcheck(args: argparse.Namespace) -> int:
    if args.dim < 4:
        raise ValueError("negcheck applies to --dim >= 4 (use certify for 2 and 3)")
    gap = zeta_gap_ok(args.dim)
    failures = negativity_failures(args.dim, args.r_max, stop_early=False)
    scanned = max(0, (args.r_max - 1) // 2)
    print(f"negcheck m={args.dim} r_max={args.r_max}")
    print(f"zeta gap 2^-({args.dim}+1): {'ok' if gap else 'FAIL'}")
    print(f"odd radii scanned: {scanned}")
    if failures:
        print("nonnegative sums at: " + ",".join(str(r) for r in failures))
    else:
        print("all fractional sums negative")
    return EXIT_OK if gap and not failures else EXIT_FAIL


def _cmd_witness(args: argparse.Namespace) -> int:
    report = witness_scan(args.dim, args.primes, args.k, args.cap,
                          threads=_resolve_threads(args))
    print(WITNESS_CSV_HEADER)
    for row in report.rows:
        fields = (
            str(row.m),
            str(row.r),
            str(row.k),
            row.s_decimal,
            str(row.count),
            format_rational(row.error.lo),
            format_rational(row.error.hi),
            format_rational(row.normalized.lo),
            format_rational(row.normalized.hi),
        )
        print(",".join(fields))
    for k, r in report.skipped:
        print(f"skipped: k={k} r={r} over cap {report.cap}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "count": _cmd_count,
    "error": _cmd_error,
    "certify": _cmd_certify,
    "negcheck": _cmd_negcheck,
    "witness": _cmd_witness,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (CapacityError, BudgetError) as exc:
        print(f"vispoints: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValueError as exc:
        print(f"vispoints: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
