"""Report assembly, lint pipeline, CLI contract, and output formats."""

from __future__ import annotations

import json
import subprocess
import sys

from drlint.engine import run_to_fixpoint
from drlint.extract import extract_model
from drlint.graph import Edge, ModelGraph, Node
from drlint.parser import SourceUnit
from drlint.report import (
    EngineStats,
    extract_report,
    lint,
    report_to_dict,
    report_to_json,
    report_to_text,
)

from conftest import REPO_ROOT, clean_source, fixture_source


def run_cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "drlint", *args],
        capture_output=True, text=True, cwd=REPO_ROOT,
    )


# -- extract_report -----------------------------------------------------------


def _flagged(nodes_edges) -> ModelGraph:
    return ModelGraph(*nodes_edges)


def test_report_of_fault_free_graph_is_empty():
    g = ModelGraph([Node(1, "DRLProgram")])
    report = extract_report(g, "p.py")
    assert report.findings == ()
    assert report.summary == {}


def test_findings_sorted_by_line_then_code():
    g = _flagged((
        [Node(1, "DRLProgram"),
         Node(2, "Exploration"),
         Node(3, "TargetNetwork"),
         Node(4, "Fault", {"code": "F07", "message": "late"}, line=30),
         Node(5, "Fault", {"code": "F05", "message": "early"}, line=12)],
        [Edge(1, "hasAgent", 1, 1)] and
        [Edge(1, "flagged", 1, 4), Edge(2, "flagged", 1, 5),
         Edge(3, "at", 4, 3), Edge(4, "at", 5, 2)],
    ))
    report = extract_report(g, "p.py")
    assert [(f.code, f.line) for f in report.findings] == [("F05", 12), ("F07", 30)]
    assert report.findings[0].nodes == (2,)
    assert report.findings[0].title == "Suboptimal exploration rate"


def test_duplicate_codes_counted_in_summary():
    g = _flagged((
        [Node(1, "DRLProgram"), Node(2, "Step", line=5), Node(3, "Step", line=9),
         Node(4, "Fault", {"code": "F02", "message": "m"}, line=5),
         Node(5, "Fault", {"code": "F02", "message": "m"}, line=9)],
        [Edge(1, "flagged", 1, 4), Edge(2, "flagged", 1, 5),
         Edge(3, "at", 4, 2), Edge(4, "at", 5, 3)],
    ))
    report = extract_report(g, "p.py")
    assert len(report.findings) == 2
    assert report.summary == {"F02": 2}


def test_two_unguarded_steps_produce_two_f02_findings(catalog_rules):
    text = (
        'import gym\n'
        'env = gym.make("X-v0")\n'
        'state = env.reset()\n'
        'while True:\n'
        '    a, b, c, d = env.step(0)\n'
        '    e, f, g, h = env.step(1)\n'
        'env.close()\n'
    )
    report = lint(SourceUnit("two_steps.py", text), catalog_rules)
    assert [f.code for f in report.findings] == ["F02", "F02"]
    assert report.summary == {"F02": 2}
    host = extract_model(SourceUnit("two_steps.py", text))
    final = run_to_fixpoint(catalog_rules, host)
    assert len(report.findings) == len(final.nodes_of_type("Fault"))


# -- lint ----------------------------------------------------------------------


def test_lint_clean_fixture_is_empty(catalog_rules):
    report = lint(clean_source(), catalog_rules)
    assert report.findings == ()
    assert report.stats.firings == 0


def test_lint_missing_exploration_recreation(catalog_rules):
    report = lint(fixture_source("real/real_so47750291.py"), catalog_rules)
    assert [f.code for f in report.findings] == ["F04"]


def test_lint_missing_close_recreation(catalog_rules):
    report = lint(fixture_source("real/real_so50308750.py"), catalog_rules)
    assert [f.code for f in report.findings] == ["F03"]


def test_lint_canonical_json_is_deterministic(catalog_rules):
    src = fixture_source("synthetic/syn_f06_no_max.py")
    a = report_to_json(lint(src, catalog_rules), include_millis=False)
    b = report_to_json(lint(src, catalog_rules), include_millis=False)
    assert a == b
    assert "millis" not in a
    assert "firings" in a


def test_report_json_schema_fields(catalog_rules):
    report = lint(fixture_source("synthetic/syn_f11_sigmoid_output.py"), catalog_rules)
    doc = report_to_dict(report)
    assert set(doc) == {"source", "findings", "summary", "stats"}
    finding = doc["findings"][0]
    assert set(finding) == {"code", "title", "message", "line", "nodes"}
    assert doc["stats"]["firings"] == 1
    assert isinstance(doc["stats"]["millis"], float)


def test_text_format_shape():
    report = extract_report(
        ModelGraph(
            [Node(1, "DRLProgram"), Node(2, "Step", line=7),
             Node(3, "Fault", {"code": "F02", "message": "no check"}, line=7)],
            [Edge(1, "flagged", 1, 3), Edge(2, "at", 3, 2)],
        ),
        "prog.py", EngineStats(1, 2.0),
    )
    text = report_to_text(report)
    lines = text.splitlines()
    assert lines[0] == "7: F02 Terminal state never checked — no check"
    assert lines[1] == "prog.py: 1 finding (F02=1)"


# -- CLI ---------------------------------------------------------------------------


def test_cli_exit_zero_on_clean():
    proc = run_cli("corpus/clean/dqn_cartpole.py")
    assert proc.returncode == 0
    assert "0 findings" in proc.stdout


def test_cli_exit_one_with_findings_json():
    proc = run_cli("corpus/synthetic/syn_f01_no_step.py", "--format", "json")
    assert proc.returncode == 1
    doc = json.loads(proc.stdout)
    assert [f["code"] for f in doc["findings"]] == ["F01"]


def test_cli_exit_two_on_syntax_error(tmp_path):
    bad = tmp_path / "bad.py"
    bad.write_text("def f(:\n")
    proc = run_cli(str(bad))
    assert proc.returncode == 2
    assert "syntax error" in proc.stderr


def test_cli_exit_two_on_missing_file():
    proc = run_cli("no/such/file.py")
    assert proc.returncode == 2


def test_cli_exit_two_on_non_utf8_file(tmp_path):
    binary = tmp_path / "junk.py"
    binary.write_bytes(b"\xff\xfe\x00bad")
    proc = run_cli(str(binary))
    assert proc.returncode == 2


def test_cli_exit_two_on_bad_rule_file(tmp_path):
    rules = tmp_path / "rules.json"
    rules.write_text("{}")
    proc = run_cli("corpus/clean/dqn_cartpole.py", "--rules", str(rules))
    assert proc.returncode == 2
    assert "cannot load rules" in proc.stderr


def test_cli_dump_model_emits_engine_input():
    proc = run_cli("corpus/clean/dqn_cartpole.py", "--dump-model")
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert {n["type"] for n in doc["nodes"]} >= {"DRLProgram", "Environment", "QNetwork"}
    assert all(set(e) == {"id", "label", "src", "dst"} for e in doc["edges"])


def test_cli_trace_logs_firings():
    proc = run_cli("corpus/synthetic/syn_f08_no_sync.py", "--trace")
    assert proc.returncode == 1
    assert "trace: R08" in proc.stderr


def test_cli_threshold_override():
    proc = run_cli("corpus/synthetic/syn_f07_slow_sync.py",
                   "--threshold", "syncMax=60000")
    assert proc.returncode == 0
    assert "0 findings" in proc.stdout


def test_cli_multiple_files_report_in_argument_order():
    proc = run_cli("corpus/synthetic/syn_f01_no_step.py",
                   "corpus/clean/dqn_cartpole.py", "--format", "json")
    assert proc.returncode == 1
    docs = json.loads(proc.stdout)
    assert [d["source"] for d in docs] == [
        "corpus/synthetic/syn_f01_no_step.py", "corpus/clean/dqn_cartpole.py"]


def test_cli_no_files_is_usage_error():
    proc = run_cli()
    assert proc.returncode == 2


def test_exit_code_contract_holds_for_every_manifest_fixture(manifest_entries):
    for entry in manifest_entries:
        proc = run_cli(f"corpus/{entry['path']}")
        want = 1 if entry["expectedFindings"] else 0
        assert proc.returncode == want, entry["path"]
