"""Command-line entry point: ``lifted verify`` and ``lifted demo``.

Exit codes: 0 when every case passes, 1 when any case fails, 2 on usage
errors (unknown suite or demo, malformed config, unreadable paths).  The
environment variable LIFTED_SEED overrides the config-file seed; an
explicit --seed flag wins over both.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .demos import DEMOS
from .errors import UsageError
from .harness import DEFAULT_SEED, SuiteConfig, run_suite

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lifted",
        description="verification suites and demos for lifted functional "
                    "calculus")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a named property suite")
    verify.add_argument("--suite", default="all",
                        help="suite name or 'all' (default: all)")
    verify.add_argument("--seed", type=int, default=None,
                        help="root seed (unsigned 64-bit)")
    verify.add_argument("--config", default=None,
                        help="JSON config file with suite/seed/overrides")
    verify.add_argument("--report", default=None,
                        help="write the JSON report to this path")
    verify.add_argument("--timings", action="store_true",
                        help="record wall time per case (forfeits "
                             "byte-identical reports)")

    demo = sub.add_parser("demo", help="run an end-to-end demo scenario")
    demo.add_argument("name", choices=sorted(DEMOS),
                      help="demo scenario to run")
    demo.add_argument("--seed", type=int, default=0, help="scenario seed")
    demo.add_argument("--count", type=int, default=None,
                      help="number of table rows (where applicable)")
    demo.add_argument("--dim", type=int, default=None,
                      help="base-space dimension (where applicable)")
    demo.add_argument("--refine", type=int, default=None,
                      help="refinement levels (stokes-boundary)")
    demo.add_argument("--dump", default=None,
                      help="write the table data as JSON to this path")
    return parser


def _env_seed() -> int | None:
    raw = os.environ.get("LIFTED_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise UsageError(f"LIFTED_SEED must be an integer, got {raw!r}") from exc


def _verify(args) -> int:
    env_seed = _env_seed()
    if args.config is not None:
        # a non-default --suite wins over the config file's suite
        config = SuiteConfig.from_file(
            args.config,
            suite=None if args.suite == "all" else args.suite,
            report=args.report)
        if env_seed is not None:
            config.seed = env_seed
    else:
        config = SuiteConfig(
            suite=args.suite,
            seed=env_seed if env_seed is not None else DEFAULT_SEED,
            report=args.report)
    if args.seed is not None:
        config.seed = args.seed
    config.timings = bool(args.timings)
    config.validate()

    result = run_suite(config)
    summary = result.summary
    for case in result.cases:
        if case.status != "pass":
            print(f"{case.status.upper():4s} {case.id}  "
                  f"residual {case.residual:.6e}  tolerance {case.tolerance:.1e}")
    print(f"suite {result.suite}: {summary['pass']} passed, "
          f"{summary['fail']} failed, {summary['skip']} skipped "
          f"(seed {result.seed}, {len(result.cases)} cases)")

    report_path = config.report
    if report_path is not None:
        try:
            with open(report_path, "w") as fh:
                fh.write(result.to_json())
        except OSError as exc:
            raise UsageError(f"cannot write report: {exc}") from exc
        print(f"report written to {report_path}")
    return 1 if result.failed else 0


def _demo(args) -> int:
    kwargs = {"seed": args.seed}
    if args.name == "stokes-boundary":
        refine = 5 if args.refine is None else args.refine
        if refine < 1 or refine > 8:
            raise UsageError("--refine must be between 1 and 8")
        kwargs["refine"] = refine
    elif args.refine is not None:
        raise UsageError(f"--refine does not apply to {args.name}")
    if args.count is not None:
        if args.name == "stokes-boundary":
            raise UsageError("--count does not apply to stokes-boundary")
        if args.count < 1:
            raise UsageError("--count must be positive")
        kwargs["count"] = args.count
    if args.dim is not None:
        if args.name == "stokes-boundary":
            raise UsageError("--dim does not apply to stokes-boundary")
        if not 1 <= args.dim <= 3:
            raise UsageError("--dim must be 1, 2 or 3")
        kwargs["dim"] = args.dim

    table = DEMOS[args.name](**kwargs)
    if args.dump is not None:
        try:
            with open(args.dump, "w") as fh:
                json.dump(table, fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            raise UsageError(f"cannot write dump: {exc}") from exc
        print(f"data written to {args.dump}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "verify":
            return _verify(args)
        return _demo(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
