"""drlint command line interface.

Exit codes: 0 = no findings, 1 = findings present, 2 = syntax/IO/rule-load
error. With --dump-model the extracted model (the engine's input) is printed
instead of a lint report.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .extract import extract_model
from .parser import SourceSyntaxError, SourceUnit
from .report import lint_traced, report_to_json, report_to_text
from .rules import RuleLoadError, builtin_catalog, load_rules

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="drlint",
        description="Statically detect common faults in DQN training scripts.",
    )
    ap.add_argument("files", nargs="*", metavar="FILES",
                    help="training scripts (.py) to lint")
    ap.add_argument("--rules", metavar="PATH",
                    help="rule document to use instead of the built-in catalog")
    ap.add_argument("--format", choices=("json", "text"), default="text",
                    help="report format (default: text)")
    ap.add_argument("--dump-model", action="store_true",
                    help="print the extracted model graph as JSON and skip linting")
    ap.add_argument("--trace", action="store_true",
                    help="log one line per rule firing to stderr")
    ap.add_argument("--threshold", action="append", default=[], metavar="NAME=VALUE",
                    help="override a rule-document threshold (repeatable)")
    return ap


def parse_threshold_overrides(pairs: list[str]) -> dict[str, float]:
    overrides: dict[str, float] = {}
    for pair in pairs:
        name, sep, raw = pair.partition("=")
        if not sep or not name:
            raise ValueError(f"--threshold expects NAME=VALUE, got {pair!r}")
        try:
            value = float(raw)
        except ValueError:
            raise ValueError(f"--threshold {name}: {raw!r} is not a number") from None
        overrides[name] = int(value) if value.is_integer() else value
    return overrides


def main(argv: list[str] | None = None) -> int:
    args = build_arg_parser().parse_args(argv)
    if not args.files:
        build_arg_parser().print_usage(sys.stderr)
        return EXIT_ERROR

    try:
        overrides = parse_threshold_overrides(args.threshold)
    except ValueError as exc:
        print(f"drlint: {exc}", file=sys.stderr)
        return EXIT_ERROR

    try:
        if args.rules:
            document = Path(args.rules).read_bytes()
        else:
            document = builtin_catalog()
        rules = load_rules(document, threshold_overrides=overrides or None)
    except (OSError, RuleLoadError) as exc:
        print(f"drlint: cannot load rules: {exc}", file=sys.stderr)
        return EXIT_ERROR

    exit_code = EXIT_CLEAN
    json_reports: list[str] = []
    for path in args.files:
        try:
            source = SourceUnit.from_path(path)
        except (OSError, UnicodeDecodeError) as exc:
            print(f"drlint: {path}: {exc}", file=sys.stderr)
            exit_code = max(exit_code, EXIT_ERROR)
            continue
        try:
            if args.dump_model:
                sys.stdout.write(extract_model(source).to_json())
                continue
            report, firings = lint_traced(source, rules)
        except SourceSyntaxError as exc:
            print(f"drlint: {path}: syntax error: {exc}", file=sys.stderr)
            exit_code = max(exit_code, EXIT_ERROR)
            continue
        if args.trace:
            for firing in firings:
                ids = " ".join(str(i) for i in firing.host_ids)
                print(f"trace: {firing.rule_id} -> {ids}", file=sys.stderr)
        if args.format == "json":
            json_reports.append(report_to_json(report))
        else:
            sys.stdout.write(report_to_text(report))
        if report.findings:
            exit_code = max(exit_code, EXIT_FINDINGS)

    if args.format == "json" and not args.dump_model:
        if len(json_reports) == 1:
            sys.stdout.write(json_reports[0])
        elif json_reports:
            sys.stdout.write("[\n" + ",\n".join(r.rstrip("\n") for r in json_reports) + "\n]\n")

    return exit_code


if __name__ == "__main__":
    sys.exit(main())
