"""Matching, NAC semantics, rule application, and fixpoint execution."""

from __future__ import annotations

import random

import pytest

from _generators import random_host, random_pattern
from _oracles import brute_force_matches, simulate_catalog

from drlint.engine import (
    AttrConstraint,
    Firing,
    IterationBudgetExceeded,
    Match,
    NacViolated,
    Pattern,
    PatternEdge,
    PatternNode,
    Rule,
    RhsEdge,
    RhsNode,
    apply_rule,
    find_matches,
    nac_holds,
    run_to_fixpoint,
)
from drlint.extract import extract_model
from drlint.graph import AT_LABEL, Edge, META_MODEL, ModelGraph, Node, conforms_to
from drlint.rules import SchemaError, builtin_catalog, load_rules

from conftest import clean_source


def mapping_of(match: Match) -> dict[str, int]:
    return match.as_dict()


# -- find_matches --------------------------------------------------------------


def test_empty_pattern_yields_one_empty_match():
    host = ModelGraph([Node(1, "Step")])
    matches = find_matches(Pattern(), host)
    assert len(matches) == 1
    assert mapping_of(matches[0]) == {}


def test_env_init_pattern_has_exactly_one_match_in_clean_model():
    host = extract_model(clean_source())
    pattern = Pattern(
        (PatternNode("e", "Environment"), PatternNode("i", "Initialize")),
        (PatternEdge("initializedBy", "e", "i"),),
    )
    oracle = brute_force_matches(pattern, host)
    matches = find_matches(pattern, host)
    assert len(oracle) == 1
    assert {frozenset(mapping_of(m).items()) for m in matches} == oracle


def test_one_match_per_step_node():
    host = ModelGraph([Node(1, "Step"), Node(2, "Step"), Node(3, "Step")])
    matches = find_matches(Pattern((PatternNode("s", "Step"),), ()), host)
    assert [mapping_of(m)["s"] for m in matches] == [1, 2, 3]


def test_matches_are_injective():
    host = ModelGraph([Node(1, "Step"), Node(2, "Step")],
                      [Edge(1, "next", 1, 2), Edge(2, "next", 2, 1)])
    pattern = Pattern(
        (PatternNode("a", "Step"), PatternNode("b", "Step")),
        (PatternEdge("next", "a", "b"),),
    )
    matches = find_matches(pattern, host)
    assert all(len(set(mapping_of(m).values())) == 2 for m in matches)
    assert len(matches) == 2


def test_match_order_is_lexicographic_by_host_ids():
    host = ModelGraph([Node(i, "Step") for i in range(1, 4)])
    pattern = Pattern((PatternNode("a", "Step"), PatternNode("b", "Step")), ())
    got = [tuple(mapping_of(m)[k] for k in ("a", "b")) for m in find_matches(pattern, host)]
    assert got == sorted(got)


def test_cross_node_constraint_requires_both_attrs():
    pattern = Pattern((
        PatternNode("e", "Environment"),
        PatternNode("q", "QNetwork",
                    (AttrConstraint("outputDim", "!=", other_node="e",
                                    other_attr="numActions"),)),
    ), ())
    both = ModelGraph([Node(1, "Environment", {"numActions": 2}),
                       Node(2, "QNetwork", {"outputDim": 3})])
    missing = ModelGraph([Node(1, "Environment"),
                          Node(2, "QNetwork", {"outputDim": 3})])
    assert len(find_matches(pattern, both)) == 1
    assert find_matches(pattern, missing) == []
    assert brute_force_matches(pattern, missing) == set()


def test_random_hosts_match_brute_force_small():
    rng = random.Random(1338)
    for _ in range(150):
        host = random_host(rng, max_nodes=6)
        pattern = random_pattern(rng, max_nodes=3)
        got = {frozenset(mapping_of(m).items()) for m in find_matches(pattern, host)}
        assert got == brute_force_matches(pattern, host)


def test_nac_semantics_match_brute_force_extension():
    # Random NACs share node ids with random LHS patterns (both use p0..pN),
    # exercising glue pinning, deferred binary constraints, and injectivity.
    from _oracles import brute_force_nac_blocked

    rng = random.Random(4242)
    checked = 0
    for _ in range(600):
        host = random_host(rng, max_nodes=6)
        if not host.nodes:
            continue
        # Build the LHS from actual host nodes so matches always exist; the
        # NAC reuses the same p0.. id space, giving real glue overlap.
        picked = rng.sample(list(host.nodes), rng.randint(1, min(2, len(host.nodes))))
        lhs = Pattern(tuple(PatternNode(f"p{i}", n.type)
                            for i, n in enumerate(picked)), ())
        nac = random_pattern(rng, max_nodes=3)
        for match in find_matches(lhs, host)[:5]:
            want = not brute_force_nac_blocked(nac, host, mapping_of(match))
            assert nac_holds(match, nac, host) == want
            checked += 1
    assert checked > 500


# -- nac_holds -------------------------------------------------------------------


def _missing_step_rule() -> Rule:
    rules = load_rules(builtin_catalog())
    return next(r for r in rules if r.id == "R01")


def _env_only_host(with_step: bool, flagged_init: bool = False) -> ModelGraph:
    nodes = [Node(1, "DRLProgram"), Node(2, "Environment"), Node(3, "Initialize", line=4)]
    edges = [Edge(1, "hasEnv", 1, 2), Edge(2, "initializedBy", 2, 3)]
    if with_step:
        nodes.append(Node(4, "Step"))
        edges.append(Edge(3, "followedBy", 3, 4))
    if flagged_init:
        nodes.append(Node(9, "Fault", {"code": "F01", "message": "m"}))
        edges.append(Edge(8, "flagged", 1, 9))
        edges.append(Edge(9, AT_LABEL, 9, 3))
    return ModelGraph(nodes, edges)


def test_nac_fires_when_step_absent():
    rule = _missing_step_rule()
    host = _env_only_host(with_step=False)
    match = find_matches(rule.lhs, host, rule.id)[0]
    step_nac = rule.nacs[0]
    assert nac_holds(match, step_nac, host) is True  # forbidden structure absent


def test_nac_blocks_when_step_present():
    rule = _missing_step_rule()
    host = _env_only_host(with_step=True)
    match = find_matches(rule.lhs, host, rule.id)[0]
    assert nac_holds(match, rule.nacs[0], host) is False


def test_self_nac_blocks_already_flagged_location():
    rule = _missing_step_rule()
    host = _env_only_host(with_step=False, flagged_init=True)
    match = find_matches(rule.lhs, host, rule.id)[0]
    self_nac = rule.nacs[1]
    assert nac_holds(match, self_nac, host) is False


# -- apply_rule --------------------------------------------------------------------


def test_apply_rule_adds_anchored_flagged_fault():
    rule = _missing_step_rule()
    host = _env_only_host(with_step=False)
    match = find_matches(rule.lhs, host, rule.id)[0]
    out = apply_rule(rule, match, host)
    faults = [out.node(i) for i in out.nodes_of_type("Fault")]
    assert len(faults) == 1
    fault = faults[0]
    assert fault.attrs["code"] == "F01"
    assert fault.line == 4  # inherited from the anchored Initialize node
    assert out.has_edge("flagged", 1, fault.id)
    assert out.has_edge(AT_LABEL, fault.id, 3)
    assert conforms_to(out, META_MODEL) == []
    # input untouched
    assert len(host.nodes_of_type("Fault")) == 0


def test_apply_rule_twice_raises_nac_violated():
    rule = _missing_step_rule()
    host = _env_only_host(with_step=False)
    match = find_matches(rule.lhs, host, rule.id)[0]
    once = apply_rule(rule, match, host)
    with pytest.raises(NacViolated):
        apply_rule(rule, match, once)


def test_apply_rule_with_stale_match_raises_invalid_match():
    from drlint.engine import InvalidMatch

    rule = _missing_step_rule()
    host = _env_only_host(with_step=False)
    match = find_matches(rule.lhs, host, rule.id)[0]
    shrunk = ModelGraph([Node(1, "DRLProgram"), Node(2, "Environment"),
                         Node(3, "Reset")],
                        [Edge(1, "hasEnv", 1, 2), Edge(2, "resetBy", 2, 3)])
    with pytest.raises(InvalidMatch):
        apply_rule(rule, match, shrunk)


def test_rule_with_empty_rhs_is_rejected_at_load_time():
    doc = builtin_catalog().to_dict()
    doc["rules"][0]["rhs"] = {"nodes": [], "edges": []}
    import json
    with pytest.raises(SchemaError):
        load_rules(json.dumps(doc))


# -- run_to_fixpoint -----------------------------------------------------------------


def test_no_rules_means_identity():
    host = _env_only_host(with_step=False)
    assert run_to_fixpoint([], host) == host


def test_clean_model_reaches_fixpoint_with_zero_faults(catalog_rules):
    host = extract_model(clean_source())
    final = run_to_fixpoint(catalog_rules, host)
    assert len(final.nodes_of_type("Fault")) == 0
    assert simulate_catalog(catalog_rules, host) == set()


def test_double_injection_yields_exactly_two_faults(catalog_rules):
    # Clean source with both the close call removed and a bad epsilon floor.
    text = clean_source().text
    assert text.count("env.close()\n") == 1
    assert text.count("epsilon_min = 0.1\n") == 1
    text = text.replace("env.close()\n", "").replace("epsilon_min = 0.1\n",
                                                     "epsilon_min = 0.5\n")
    from drlint.parser import SourceUnit
    host = extract_model(SourceUnit("double.py", text))
    expected = simulate_catalog(catalog_rules, host)
    assert sorted(code for code, _ in expected) == ["F03", "F05"]

    firings: list[Firing] = []
    final = run_to_fixpoint(catalog_rules, host, firings)
    got = {(final.node(i).attrs["code"],
            final.out_edges(i, AT_LABEL)[0].dst)
           for i in final.nodes_of_type("Fault")}
    assert got == expected
    assert len(firings) == 2


def test_fixpoint_is_idempotent_and_monotonic(catalog_rules):
    text = clean_source().text.replace("env.close()\n", "")
    from drlint.parser import SourceUnit
    host = extract_model(SourceUnit("x.py", text))
    final = run_to_fixpoint(catalog_rules, host)
    assert {n.id for n in host.nodes} <= {n.id for n in final.nodes}
    again = run_to_fixpoint(catalog_rules, final)
    assert again == final
    only_new = [n for n in final.nodes if not host.has_node(n.id)]
    assert all(n.type == "Fault" for n in only_new)


def test_fixpoint_deterministic_under_rule_permutation(catalog_rules):
    text = clean_source().text.replace("gamma = 0.95\n", "gamma = 1.5\n")
    from drlint.parser import SourceUnit
    host = extract_model(SourceUnit("x.py", text))
    baseline = run_to_fixpoint(catalog_rules, host)
    base_faults = sorted((baseline.node(i).attrs["code"], baseline.node(i).line)
                         for i in baseline.nodes_of_type("Fault"))
    rng = random.Random(7)
    for _ in range(5):
        shuffled = list(catalog_rules)
        rng.shuffle(shuffled)
        priorities = list(range(len(shuffled)))
        rng.shuffle(priorities)
        reprioritized = [
            Rule(r.id, priorities[i], r.lhs, r.nacs, r.rhs_nodes, r.rhs_edges,
                 r.fault_code, r.message_template)
            for i, r in enumerate(shuffled)
        ]
        final = run_to_fixpoint(reprioritized, host)
        faults = sorted((final.node(i).attrs["code"], final.node(i).line)
                        for i in final.nodes_of_type("Fault"))
        assert faults == base_faults


def test_budget_guards_against_rules_without_self_nac():
    # Hand-built pathological rule (bypassing load-time validation): no NACs,
    # so it would fire forever on its own output.
    rule = Rule(
        id="bad", priority=0,
        lhs=Pattern((PatternNode("s", "Step"),), ()),
        nacs=(),
        rhs_nodes=(RhsNode("f", "Fault"),),
        rhs_edges=(RhsEdge("at", "f", "s"),),
        fault_code="X99", message_template="m",
    )
    host = ModelGraph([Node(1, "DRLProgram"), Node(2, "Step")])
    with pytest.raises(IterationBudgetExceeded):
        run_to_fixpoint([rule], host)
