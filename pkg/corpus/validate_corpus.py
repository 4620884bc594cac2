#!/usr/bin/env python3
"""Corpus validator: manifest consistency, coverage, and fixture parseability.

Checks, in order:
  1. manifest schema and referenced files exist
  2. per-entry consistency (synthetic findings equal injected codes, the
     clean baseline expects nothing, recreations carry a source reference)
  3. corpus-wide coverage (15 synthetic + 1 clean + 6 recreations; every
     implemented fault code covered; multi-context types F05/F07 have at
     least two synthetic fixtures)
  4. every fixture parses under the linter's supported subset, probed
     through the `drlint --dump-model` interface

Usage:
    python corpus/validate_corpus.py [corpus/manifest.json]

Exit codes: 0 = no violations, 1 = violations found or manifest unreadable.
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

RULE_CODES = ("F01", "F02", "F03", "F04", "F05", "F06", "F07", "F08", "F10", "F11")
MULTI_CONTEXT_CODES = {"F05": 2, "F07": 2}
KINDS = ("clean", "synthetic", "real-recreation")
EXPECTED_COUNTS = {"clean": 1, "synthetic": 15, "real-recreation": 6}

REQUIRED_FIELDS = ("path", "kind", "injectedFaults", "expectedFindings",
                   "expectedGraph", "description")


def load_manifest(manifest_path: Path) -> dict:
    return json.loads(manifest_path.read_text(encoding="utf-8"))


def fixture_parses(corpus_dir: Path, rel_path: str) -> bool:
    """Probe the linter's extractor through its CLI contract."""
    proc = subprocess.run(
        [sys.executable, "-m", "drlint", str(corpus_dir / rel_path), "--dump-model"],
        capture_output=True, text=True,
    )
    if proc.returncode != 0:
        return False
    try:
        doc = json.loads(proc.stdout)
    except json.JSONDecodeError:
        return False
    return isinstance(doc, dict) and "nodes" in doc and "edges" in doc


def validate_corpus(manifest: dict, corpus_dir: Path,
                    check_parsing: bool = True) -> list[str]:
    violations: list[str] = []
    entries = manifest.get("entries")
    if not isinstance(entries, list) or not entries:
        return ["manifest carries no entries"]

    by_kind: dict[str, int] = {}
    covered: set[str] = set()
    synthetic_counts: dict[str, int] = {}

    for entry in entries:
        path = entry.get("path", "<missing path>")
        for field in REQUIRED_FIELDS:
            if field not in entry:
                violations.append(f"{path}: missing field {field!r}")
        kind = entry.get("kind")
        if kind not in KINDS:
            violations.append(f"{path}: unknown kind {kind!r}")
            continue
        by_kind[kind] = by_kind.get(kind, 0) + 1

        fixture = corpus_dir / path
        if not fixture.is_file():
            violations.append(f"{path}: fixture file does not exist")
        graph_path = corpus_dir / entry.get("expectedGraph", "")
        if not graph_path.is_file():
            violations.append(f"{path}: expected graph {entry.get('expectedGraph')} missing")
        else:
            try:
                doc = json.loads(graph_path.read_text(encoding="utf-8"))
                if "nodes" not in doc or "edges" not in doc:
                    violations.append(f"{path}: expected graph is not a model document")
            except json.JSONDecodeError:
                violations.append(f"{path}: expected graph is not valid JSON")

        expected = list(entry.get("expectedFindings", []))
        injected = [f.get("code") for f in entry.get("injectedFaults", [])]
        covered.update(expected)

        if kind == "clean" and expected:
            violations.append(f"{path}: clean baseline must expect no findings")
        if kind == "synthetic":
            if sorted(expected) != sorted(injected):
                violations.append(
                    f"{path}: expected findings {expected} differ from injected {injected}")
            for code in expected:
                synthetic_counts[code] = synthetic_counts.get(code, 0) + 1
        if kind == "real-recreation" and not entry.get("sourceRef"):
            violations.append(f"{path}: recreation lacks a sourceRef")
        for fault in entry.get("injectedFaults", []):
            hint = fault.get("sourceLineHint")
            if hint is not None and (not isinstance(hint, int) or hint < 1):
                violations.append(f"{path}: bad sourceLineHint {hint!r}")

        if check_parsing and fixture.is_file():
            if not fixture_parses(corpus_dir, path):
                violations.append(f"{path}: does not parse under the supported subset")

    for kind, want in EXPECTED_COUNTS.items():
        if by_kind.get(kind, 0) != want:
            violations.append(
                f"corpus: expected {want} {kind} entries, found {by_kind.get(kind, 0)}")
    for code in RULE_CODES:
        if code not in covered:
            violations.append(f"corpus: fault code {code} is not covered by any fixture")
        if synthetic_counts.get(code, 0) < 1:
            violations.append(f"corpus: fault code {code} has no synthetic fixture")
    for code, minimum in MULTI_CONTEXT_CODES.items():
        if synthetic_counts.get(code, 0) < minimum:
            violations.append(
                f"corpus: {code} needs >= {minimum} synthetic fixtures "
                f"(has {synthetic_counts.get(code, 0)})")
    return violations


def main(argv: list[str] | None = None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    manifest_path = Path(args[0]) if args else Path(__file__).parent / "manifest.json"
    try:
        manifest = load_manifest(manifest_path)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"validate_corpus: cannot read manifest: {exc}", file=sys.stderr)
        return 1
    violations = validate_corpus(manifest, manifest_path.parent)
    for v in violations:
        print(f"violation: {v}")
    print(f"{len(violations)} violations in {len(manifest.get('entries', []))} entries")
    return 0 if not violations else 1


if __name__ == "__main__":
    sys.exit(main())
