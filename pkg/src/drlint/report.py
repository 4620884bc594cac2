"""Fault reports: the lint pipeline output, in canonical JSON and text forms."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from .engine import Firing, Rule, run_to_fixpoint
from .extract import extract_model
from .graph import AT_LABEL, FAULT_TYPE, ModelGraph
from .parser import SourceUnit
from .rules import fault_title


@dataclass(frozen=True)
class FaultFinding:
    code: str
    title: str
    message: str
    line: int | None
    nodes: tuple[int, ...]


@dataclass(frozen=True)
class EngineStats:
    firings: int
    millis: float


@dataclass(frozen=True)
class FaultReport:
    source: str
    findings: tuple[FaultFinding, ...]
    summary: dict[str, int]
    stats: EngineStats


def extract_report(final: ModelGraph, source_path: str = "",
                   stats: EngineStats | None = None) -> FaultReport:
    """One finding per Fault node, sorted by source line then fault code."""
    findings = []
    for fault_id in final.nodes_of_type(FAULT_TYPE):
        node = final.node(fault_id)
        code = str(node.attrs.get("code", ""))
        anchors = tuple(sorted(e.dst for e in final.out_edges(fault_id, AT_LABEL)))
        findings.append(FaultFinding(
            code=code,
            title=fault_title(code),
            message=str(node.attrs.get("message", "")),
            line=node.line,
            nodes=anchors,
        ))
    findings.sort(key=lambda f: (f.line is None, f.line or 0, f.code, f.nodes))
    summary: dict[str, int] = {}
    for f in findings:
        summary[f.code] = summary.get(f.code, 0) + 1
    return FaultReport(
        source=source_path,
        findings=tuple(findings),
        summary=dict(sorted(summary.items())),
        stats=stats or EngineStats(0, 0.0),
    )


def lint(source: SourceUnit, rules: list[Rule]) -> FaultReport:
    """Extract the model, run the rules to fixpoint, report the fault nodes."""
    started = time.perf_counter()
    model = extract_model(source)
    firings: list[Firing] = []
    final = run_to_fixpoint(rules, model, firings)
    millis = (time.perf_counter() - started) * 1000.0
    return extract_report(final, source.path, EngineStats(len(firings), millis))


def lint_traced(source: SourceUnit, rules: list[Rule]) -> tuple[FaultReport, list[Firing]]:
    started = time.perf_counter()
    model = extract_model(source)
    firings: list[Firing] = []
    final = run_to_fixpoint(rules, model, firings)
    millis = (time.perf_counter() - started) * 1000.0
    return extract_report(final, source.path, EngineStats(len(firings), millis)), firings


def report_to_dict(report: FaultReport, include_millis: bool = True) -> dict:
    stats: dict = {"firings": report.stats.firings}
    if include_millis:
        stats["millis"] = round(report.stats.millis, 3)
    return {
        "source": report.source,
        "findings": [
            {
                "code": f.code,
                "title": f.title,
                "message": f.message,
                "line": f.line,
                "nodes": list(f.nodes),
            }
            for f in report.findings
        ],
        "summary": dict(report.summary),
        "stats": stats,
    }


def report_to_json(report: FaultReport, include_millis: bool = True) -> str:
    return json.dumps(report_to_dict(report, include_millis), indent=2) + "\n"


def report_to_text(report: FaultReport) -> str:
    lines = []
    for f in report.findings:
        where = "-" if f.line is None else str(f.line)
        lines.append(f"{where}: {f.code} {f.title} — {f.message}")
    total = len(report.findings)
    counts = " ".join(f"{code}={n}" for code, n in report.summary.items())
    noun = "finding" if total == 1 else "findings"
    summary = f"{report.source}: {total} {noun}" + (f" ({counts})" if counts else "")
    lines.append(summary)
    return "\n".join(lines) + "\n"
