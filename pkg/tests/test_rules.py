"""Rule-document loading, invariants, and built-in catalog behavior."""

from __future__ import annotations

import json

import pytest

from drlint.engine import run_to_fixpoint
from drlint.extract import extract_model
from drlint.parser import SourceUnit
from drlint.rules import (
    DEFAULT_THRESHOLDS,
    FAULT_CODES,
    ParseError,
    RULE_FAULT_CODES,
    SchemaError,
    UnknownThreshold,
    builtin_catalog,
    builtin_rules_path_bytes,
    fault_title,
    load_rules,
)

from conftest import clean_source, fixture_source, load_manifest


def catalog_json() -> dict:
    return builtin_catalog().to_dict()


def test_fault_code_registry_bijection():
    assert sorted(FAULT_CODES) == [f"F{i:02d}" for i in range(1, 12)]
    assert sorted(fc.taxonomy_type for fc in FAULT_CODES.values()) == list(range(1, 12))
    # F09 needs runtime analysis; it is declared but carries no rule.
    assert "F09" not in RULE_FAULT_CODES
    assert fault_title("F01") == FAULT_CODES["F01"].title
    assert fault_title("X42") == "X42"


def test_builtin_catalog_covers_the_ten_detection_codes():
    rules = load_rules(builtin_catalog())
    assert sorted({r.fault_code for r in rules}) == list(RULE_FAULT_CODES)
    # Disjunctive taxonomy facets are split into variants; 17 records total.
    assert len(rules) == 17
    assert all(r.priority == 0 for r in rules)


def test_builtin_catalog_has_defaults_and_loads_cleanly():
    doc = builtin_catalog()
    assert doc.thresholds == DEFAULT_THRESHOLDS
    assert doc.format_version == "1"
    load_rules(doc.to_json_bytes())  # no SchemaError against the meta-model


def test_shipped_rule_file_matches_embedded_catalog():
    on_disk = json.loads(builtin_rules_path_bytes().decode("utf-8"))
    assert on_disk == catalog_json()


def test_malformed_json_raises_parse_error():
    with pytest.raises(ParseError):
        load_rules(b"{not json")
    with pytest.raises(ParseError):
        load_rules(b"\xff\xfe\x00")


def test_missing_self_nac_is_a_schema_error():
    doc = catalog_json()
    record = next(r for r in doc["rules"] if r["id"] == "R02")
    record["nacs"] = record["nacs"][:1]  # drop the self-NAC, keep the real NAC
    with pytest.raises(SchemaError, match="self-NAC"):
        load_rules(json.dumps(doc))


def test_unknown_threshold_reference():
    doc = catalog_json()
    doc["thresholds"] = {}
    with pytest.raises(UnknownThreshold, match=r"\$epsFinalMax"):
        load_rules(json.dumps(doc))


def test_unknown_node_type_is_a_schema_error():
    doc = catalog_json()
    doc["rules"][0]["lhs"]["nodes"][0]["type"] = "Sprocket"
    with pytest.raises(SchemaError):
        load_rules(json.dumps(doc))


def test_wrong_format_version_rejected():
    doc = catalog_json()
    doc["formatVersion"] = "2"
    with pytest.raises(SchemaError):
        load_rules(json.dumps(doc))


def test_fault_codes_restricted_to_builtin_or_x_prefixed():
    doc = catalog_json()
    doc["rules"][0]["faultCode"] = "F09"
    with pytest.raises(SchemaError):
        load_rules(json.dumps(doc))
    doc = catalog_json()
    record = doc["rules"][0]
    record["faultCode"] = "X01"
    for nac in record["nacs"]:
        for node in nac["nodes"]:
            for c in node.get("constraints", ()):
                if c.get("attr") == "code":
                    c["value"] = "X01"
    load_rules(json.dumps(doc))  # accepted


def test_threshold_override_changes_matching():
    src = fixture_source("synthetic/syn_f05_high_final_eps.py")
    host = extract_model(src)
    default_rules = load_rules(builtin_catalog())
    final = run_to_fixpoint(default_rules, host)
    assert [final.node(i).attrs["code"] for i in final.nodes_of_type("Fault")] == ["F05"]

    relaxed = load_rules(builtin_catalog(), threshold_overrides={"epsFinalMax": 0.6})
    final = run_to_fixpoint(relaxed, host)
    assert len(final.nodes_of_type("Fault")) == 0


# -- catalog behavior on key fixtures -------------------------------------------


def _codes_after(rules, source: SourceUnit) -> list[str]:
    final = run_to_fixpoint(rules, extract_model(source))
    return sorted(final.node(i).attrs["code"] for i in final.nodes_of_type("Fault"))


def test_missing_step_fixture_yields_one_f01(catalog_rules):
    assert _codes_after(catalog_rules, fixture_source("synthetic/syn_f01_no_step.py")) == ["F01"]


def test_bad_epsilon_and_missing_decay_flag_once(catalog_rules):
    # epsilonFinal = 0.5 with decay absent makes both F05 variants eligible;
    # the code-keyed self-NAC lets only one flag that Exploration node.
    from drlint.graph import Edge, ModelGraph, Node

    host = ModelGraph(
        [Node(1, "DRLProgram"),
         Node(2, "DQN"),
         Node(3, "Exploration", {"epsilon": 1.0, "epsilonFinal": 0.5}, line=9)],
        [Edge(1, "hasAgent", 1, 2), Edge(2, "explores", 2, 3)],
    )
    from drlint.engine import find_matches

    eligible = [r.id for r in catalog_rules if r.fault_code == "F05"
                and find_matches(r.lhs, host)]
    assert eligible == ["R05a", "R05b"]
    final = run_to_fixpoint(catalog_rules, host)
    faults = [final.node(i) for i in final.nodes_of_type("Fault")]
    assert [f.attrs["code"] for f in faults] == ["F05"]
    assert final.out_edges(faults[0].id, "at")[0].dst == 3


def test_two_bad_exploration_nodes_flag_independently(catalog_rules):
    from drlint.graph import Edge, ModelGraph, Node

    host = ModelGraph(
        [Node(1, "DRLProgram"),
         Node(2, "DQN"),
         Node(3, "Exploration", {"epsilonFinal": 0.5}),
         Node(4, "Exploration", {"epsilonFinal": 0.9})],
        [Edge(1, "hasAgent", 1, 2), Edge(2, "explores", 2, 3),
         Edge(3, "explores", 2, 4)],
    )
    final = run_to_fixpoint(catalog_rules, host)
    flagged = sorted(final.out_edges(i, "at")[0].dst
                     for i in final.nodes_of_type("Fault"))
    assert flagged == [3, 4]


def test_clean_fixture_yields_zero_faults(catalog_rules):
    assert _codes_after(catalog_rules, clean_source()) == []


def test_rerunning_on_own_output_is_identity(catalog_rules):
    host = extract_model(fixture_source("synthetic/syn_f08_no_sync.py"))
    final = run_to_fixpoint(catalog_rules, host)
    assert run_to_fixpoint(catalog_rules, final) == final


def test_catalog_codes_all_covered_by_corpus():
    covered = set()
    for entry in load_manifest():
        covered.update(entry["expectedFindings"])
    assert covered == set(RULE_FAULT_CODES)
