"""Command-line entry point for running and analysing campaigns.

Exit codes: 0 success, 2 configuration problem, 3 evaluator failure,
4 interrupted but resumable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .campaign import (
    CampaignConfigError,
    generate_report,
    load_campaign_config,
    run_campaign,
    run_statistical_analysis,
)
from .evaluation import EvaluatorError, run_protocol_check

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EVALUATOR = 3
EXIT_INTERRUPTED = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equigen",
        description="Multi-objective tuning of text-to-image configurations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a campaign from a JSON config")
    run_p.add_argument("config", help="path to the campaign config file")
    run_p.add_argument("--quiet", action="store_true", help="suppress progress lines")

    report_p = sub.add_parser("report", help="generate reports/ from finished run logs")
    report_p.add_argument("output_dir", help="campaign output directory")

    analyze_p = sub.add_parser("analyze", help="write reports/analysis.json for a campaign")
    analyze_p.add_argument("output_dir", help="campaign output directory")

    compare_p = sub.add_parser("compare", help="compare report.json summaries across campaigns")
    compare_p.add_argument("output_dirs", nargs="+", help="two or more campaign directories")

    check_p = sub.add_parser("protocol-check", help="run conformance checks against a bridge")
    check_p.add_argument("endpoint", help='"tcp:HOST:PORT" or a command line to spawn')
    check_p.add_argument("--timeout", type=float, default=60.0, help="per-read timeout in seconds")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        campaign = load_campaign_config(args.config)
    except CampaignConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    echo = None if args.quiet else (lambda line: print(line))
    try:
        outcome = run_campaign(campaign, echo=echo)
    except CampaignConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EvaluatorError as exc:
        print(f"evaluator error: {exc}", file=sys.stderr)
        return EXIT_EVALUATOR
    if outcome.partial:
        print(f"campaign incomplete: {outcome.error}", file=sys.stderr)
        print(f"completed {len(outcome.completed)} runs; rerun to resume", file=sys.stderr)
        return EXIT_INTERRUPTED if outcome.error_kind == "interrupted" else EXIT_EVALUATOR
    print(f"campaign complete: {len(outcome.completed)} runs in {outcome.output_dir}")
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    try:
        reports_dir = generate_report(args.output_dir)
    except (CampaignConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"reports written to {reports_dir}")
    return EXIT_OK


def _cmd_analyze(args: argparse.Namespace) -> int:
    try:
        reports_dir = run_statistical_analysis(args.output_dir)
    except (CampaignConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"analysis written to {reports_dir / 'analysis.json'}")
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    if len(args.output_dirs) < 2:
        print("error: compare needs at least two campaign directories", file=sys.stderr)
        return EXIT_CONFIG
    summaries = []
    for raw in args.output_dirs:
        path = Path(raw) / "reports" / "report.json"
        if not path.is_file():
            print(f"error: {path} not found (run 'equigen report' first)", file=sys.stderr)
            return EXIT_CONFIG
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            print(f"error: cannot read {path}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        summaries.append((raw, payload))
    print(f"{'campaign':<30} {'label':<20} {'hv_mean':>12} {'front_members':>14}")
    for raw, payload in summaries:
        per_label = payload.get("hypervolume", {}).get("per_label", {})
        counts = payload.get("pareto_counts", {})
        for label in payload.get("labels", sorted(per_label)):
            hv_mean = per_label.get(label, {}).get("mean")
            hv_text = format(hv_mean, ".6g") if isinstance(hv_mean, (int, float)) else "-"
            print(f"{raw:<30} {label:<20} {hv_text:>12} {counts.get(label, 0):>14}")
    return EXIT_OK


def _cmd_protocol_check(args: argparse.Namespace) -> int:
    endpoint: str = args.endpoint
    try:
        report = run_protocol_check(endpoint, timeout=args.timeout)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EvaluatorError as exc:
        print(f"protocol check failed: {exc}", file=sys.stderr)
        return EXIT_EVALUATOR
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        detail = f" ({check.detail})" if check.detail else ""
        print(f"{status} {check.name}{detail}")
    if not report.passed:
        print("protocol check failed", file=sys.stderr)
        return EXIT_EVALUATOR
    print(f"bridge conforms to protocol (mode: {report.mode})")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; preserve both.
        return int(exc.code or 0)
    handlers = {
        "run": _cmd_run,
        "report": _cmd_report,
        "analyze": _cmd_analyze,
        "compare": _cmd_compare,
        "protocol-check": _cmd_protocol_check,
    }
    try:
        return handlers[args.command](args)
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())
