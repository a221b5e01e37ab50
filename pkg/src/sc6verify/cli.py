"""Command-line front end.

Exit codes: 0 all checks passed, 1 a mathematical check failed,
2 usage or configuration error, 3 I/O or resource error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

from .binaryqf import class_data, loeschian_table
from .lseries import (
    REFERENCE_D,
    REFERENCE_THRESHOLD,
    REFERENCE_UPPER,
    InsufficientTerms,
    SignUnresolved,
    dirichlet_L1,
    lower_bound_constant,
    positivity_threshold,
    twisted_modular_L1,
)
from .modforms import decompose, shimura_lift_check
from .qseries import sc6_series
from .sweep import SWEEP_N_MAX, CheckpointError, SweepConfig, sweep_positivity, table_bound_for
from .ternary import Q_MAIN, Q_MATE, rep_count, rq_fast

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
KNOWN_EXCEPTIONS = (2, 12, 13, 73)


class UsageError(Exception):
    pass


def _default_threads() -> int:
    env = os.environ.get("SC6_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"SC6_THREADS={env!r} is not an integer")
        if value < 1:
            raise UsageError("SC6_THREADS must be positive")
        return value
    return os.cpu_count() or 1


def cmd_sweep(args) -> int:
    threads = args.threads if args.threads is not None else _default_threads()
    try:
        cfg = SweepConfig(
            n_max=args.max_n,
            chunk_size=args.chunk,
            worker_count=threads,
            checkpoint_path=args.checkpoint,
            report_path=args.report,
            kernel=args.kernel,
        )
    except ValueError as exc:
        raise UsageError(str(exc))
    report = sweep_positivity(cfg)
    expected = [n for n in KNOWN_EXCEPTIONS if n <= cfg.n_max]
    if args.report is None:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    print(
        f"n <= {cfg.n_max}: r_Q(24n+35) = 0 exactly for n in {report.exceptions} "
        f"({report.elapsed:.2f}s, {threads} worker(s))",
        file=sys.stderr,
    )
    return EXIT_OK if report.exceptions == expected else EXIT_FAILED


def cmd_sc6(args) -> int:
    n = args.n
    if n < 0:
        raise UsageError("n must be nonnegative")
    if args.method == "series":
        value = int(sc6_series(n + 1)[n])
    else:
        count = rq_fast(24 * n + 35, loeschian_table(table_bound_for(n)))
        if count % 12:
            print(f"r_Q({24 * n + 35}) = {count} is not divisible by 12", file=sys.stderr)
            return EXIT_FAILED
        value = count // 12
    print(value)
    return EXIT_OK


def cmd_rq(args) -> int:
    if args.n < 0:
        raise UsageError("N must be nonnegative")
    form = Q_MAIN if args.form == "main" else Q_MATE
    print(rep_count(form, args.n))
    return EXIT_OK


def cmd_classnum(args) -> int:
    try:
        data = class_data(args.D)
    except ValueError as exc:
        raise UsageError(str(exc))
    print(f"D = {data.discriminant}  h = {data.h}  w = {data.w}")
    for f in data.forms:
        print(f"  ({f.a}, {f.b}, {f.c})")
    return EXIT_OK


def cmd_decompose(args) -> int:
    if args.limit < 0:
        raise UsageError("limit must be nonnegative")
    dec = decompose(args.limit)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["n", "r_Q", "r_Qprime", "4a_E", "4a_C"])
    e4, c4 = dec.e4, dec.c4
    for n in range(args.limit + 1):
        out.writerow([n, int(dec.r_main[n]), int(dec.r_mate[n]), int(e4[n]), int(c4[n])])
    return EXIT_OK


def cmd_shimura(args) -> int:
    if args.limit < 1:
        raise UsageError("limit must be positive")
    rep = shimura_lift_check(args.limit)
    print(rep.summary())
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_lvalue(args) -> int:
    N = args.N
    if N < 35 or (N - 35) % 24:
        raise UsageError("N must have the form 24n + 35")
    try:
        lv = twisted_modular_L1(N, args.tolerance)
    except ValueError as exc:
        raise UsageError(str(exc))
    except (SignUnresolved, InsufficientTerms) as exc:
        print(f"L-value not determined: {exc}", file=sys.stderr)
        return EXIT_IO
    dl = dirichlet_L1(-N)
    a_C = int(decompose(N).c4[N]) / 4
    print(f"L(F x chi_-{N}, 1) = {lv.value:.12f}  (+/- {lv.abs_error_bound:.1e}, sign {lv.sign:+d}, "
          f"conductor {lv.extra['conductor']}, {lv.terms_used} terms)")
    print(f"L(chi_-{N}, 1)      = {dl.value:.12f}")
    print(f"a_C({N})            = {a_C}")
    if a_C and lv.value > 0:
        print(f"d_emp({N})          = {abs(a_C) / (N ** 0.25 * math.sqrt(lv.value)):.6f}  (reference d = {REFERENCE_D})")
    return EXIT_OK


def cmd_threshold(args) -> int:
    try:
        N_star = positivity_threshold(args.a, args.b, args.d, args.cup, args.eup)
    except ValueError as exc:
        raise UsageError(str(exc))
    print(f"lower-bound constant a sqrt(b)/(d pi) = {lower_bound_constant(args.a, args.b, args.d):.6f}")
    print(f"crossing N* = {N_star:.4f}")
    print(f"reference value: {REFERENCE_THRESHOLD}")
    return EXIT_OK


def cmd_verify_all(args) -> int:
    from .acceptance import run_all

    reports = run_all(args.level)
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
    return EXIT_OK if not failed else EXIT_FAILED


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sc6verify", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sweep", help="find n <= max-n with r_Q(24n+35) = 0")
    s.add_argument("--max-n", type=int, default=SWEEP_N_MAX)
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--chunk", type=int, default=65536)
    s.add_argument("--checkpoint", default=None)
    s.add_argument("--report", default=None)
    s.add_argument("--kernel", choices=("fast", "counting"), default="fast")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("sc6", help="number of self-conjugate 6-cores of n")
    s.add_argument("n", type=int)
    s.add_argument("--method", choices=("series", "lattice"), default="series")
    s.set_defaults(func=cmd_sc6)

    s = sub.add_parser("rq", help="representation number of N by Q or Q'")
    s.add_argument("n", type=int, metavar="N")
    s.add_argument("--form", choices=("main", "mate"), default="main")
    s.set_defaults(func=cmd_rq)

    s = sub.add_parser("classnum", help="reduced forms and class number of discriminant D")
    s.add_argument("D", type=int)
    s.set_defaults(func=cmd_classnum)

    s = sub.add_parser("decompose", help="CSV of r_Q, r_Q', 4a_E, 4a_C")
    s.add_argument("--limit", type=int, required=True)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("shimura", help="check the Shimura lift against A(n)")
    s.add_argument("--limit", type=int, required=True)
    s.set_defaults(func=cmd_shimura)

    s = sub.add_parser("lvalue", help="central L-values for N = 24n + 35")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--tolerance", type=float, default=1e-8)
    s.set_defaults(func=cmd_lvalue)

    s = sub.add_parser("threshold", help="crossing point of the two L-value bounds")
    s.add_argument("--a", type=float, default=3.0)
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--d", type=float, default=REFERENCE_D)
    s.add_argument("--cup", type=float, default=REFERENCE_UPPER[0])
    s.add_argument("--eup", type=float, default=REFERENCE_UPPER[1])
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("verify-all", help="run every acceptance check")
    s.add_argument("--level", choices=("quick", "full"), default="full")
    s.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CheckpointError, OSError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
