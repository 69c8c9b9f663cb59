"""Command-line entry point: ``rselab list | run <config> | batch <dir>``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import load_config, with_output
from .errors import ConfigError, IoError, ScenarioError
from .output import report_json
from .scenarios import list_scenarios, run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
CONFIG_SUFFIXES = (".yaml", ".yml", ".json")


def _summary(report) -> str:
    failed = [name for name, c in report["checks"].items() if not c["passed"]]
    status = "PASS" if report["passed"] else "FAIL (" + ", ".join(failed) + ")"
    return f"{report['scenario']}: {status}"


def _run_one(path, report_path, csv_dir, scale, echo):
    try:
        cfg = with_output(load_config(path), report_path, csv_dir)
        report = run_scenario(cfg, scale)
    except (ConfigError, IoError) as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ScenarioError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if echo and not cfg.output.report_path:
        sys.stdout.write(report_json(report))
    print(_summary(report), file=sys.stderr)
    return EXIT_PASS if report["passed"] else EXIT_FAIL


def cmd_list(args):
    for name, description, keys in list_scenarios():
        print(f"{name}\n    {description}\n    keys: {', '.join(keys) or '-'}")
    return EXIT_PASS


def cmd_run(args):
    return _run_one(args.config, args.report, args.csv_dir, args.tolerance_scale, True)


def cmd_batch(args):
    directory = Path(args.directory)
    if not directory.is_dir():
        print(f"error: {directory} is not a directory", file=sys.stderr)
        return EXIT_CONFIG
    paths = sorted(p for p in directory.iterdir() if p.suffix in CONFIG_SUFFIXES)
    if not paths:
        print(f"error: no configs in {directory}", file=sys.stderr)
        return EXIT_CONFIG

    def job(path):
        report = Path(args.report) / f"{path.stem}.json" if args.report else None
        csv_dir = Path(args.csv_dir) / path.stem if args.csv_dir else None
        return _run_one(path, report, csv_dir, args.tolerance_scale, False)

    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        codes = list(pool.map(job, paths))
    return max(codes)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rselab",
        description="Verification scenarios for massless wave, RSE and Helmholtz fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list registered scenarios").set_defaults(func=cmd_list)

    def common(p):
        p.add_argument("--report", help="report path (run) or report directory (batch)")
        p.add_argument("--csv-dir", help="directory for CSV dumps")
        p.add_argument("--tolerance-scale", type=float, default=1.0,
                       help="multiply every tolerance by this factor")

    run = sub.add_parser("run", help="run one scenario config")
    run.add_argument("config")
    common(run)
    run.set_defaults(func=cmd_run)

    batch = sub.add_parser("batch", help="run every config in a directory")
    batch.add_argument("directory")
    batch.add_argument("--jobs", type=int, default=1, help="parallel scenarios")
    common(batch)
    batch.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "tolerance_scale", 1.0) <= 0:
        print("error: --tolerance-scale must be > 0", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
