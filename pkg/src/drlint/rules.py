"""Rule documents: the JSON rule format, validation, and the built-in catalog.

A rule document is UTF-8 JSON carrying named thresholds and a list of
detection rules. Constraint values may reference thresholds as "$name";
substitution happens at load time so the engine only ever sees concrete
literals. Every rule must add exactly one Fault node anchored (via an "at"
edge) to one of its matched nodes, and must carry a self-NAC forbidding a
fault with its own code at that anchor — that is what makes fixpoint
execution terminate and re-running it a no-op.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Mapping

from .engine import (
    AttrConstraint,
    COMPARATORS,
    Pattern,
    PatternEdge,
    PatternNode,
    RhsEdge,
    RhsNode,
    Rule,
)
from .graph import AT_LABEL, FAULT_TYPE, META_MODEL, TypeGraph, kind_accepts

FORMAT_VERSION = "1"

BUILTIN_RULES_RESOURCE = "builtin_rules.json"


class RuleLoadError(Exception):
    """Base error for rule-document loading."""


class ParseError(RuleLoadError):
    """Document is not well-formed UTF-8 JSON."""


class SchemaError(RuleLoadError):
    """Document violates the rule-document schema or a rule invariant."""


class UnknownThreshold(RuleLoadError):
    """A "$name" constraint value has no entry in the thresholds map."""


# ---------------------------------------------------------------------------
# Fault code registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FaultCode:
    code: str
    title: str
    taxonomy_type: int


#: One entry per taxonomy leaf. F09 (gradient computation) is declared but has
#: no detection rule: it needs runtime analysis, not a model check.
FAULT_CODES: dict[str, FaultCode] = {
    fc.code: fc
    for fc in (
        FaultCode("F01", "Environment never stepped", 1),
        FaultCode("F02", "Terminal state never checked", 2),
        FaultCode("F03", "Environment not reset or closed", 3),
        FaultCode("F04", "Missing exploration strategy", 4),
        FaultCode("F05", "Suboptimal exploration rate", 5),
        FaultCode("F06", "Wrong Q-value update rule", 6),
        FaultCode("F07", "Suboptimal target network sync frequency", 7),
        FaultCode("F08", "Target network never synchronized", 8),
        FaultCode("F09", "Wrong gradient calculation", 9),
        FaultCode("F10", "Output layer size does not match action count", 10),
        FaultCode("F11", "Squashing activation on the output layer", 11),
    )
}

RULE_FAULT_CODES = tuple(c for c in FAULT_CODES if c != "F09")


def fault_title(code: str) -> str:
    entry = FAULT_CODES.get(code)
    return entry.title if entry else code


# ---------------------------------------------------------------------------
# Document model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RuleDocument:
    """Parsed rule file: raw rule records plus the threshold table."""

    format_version: str
    thresholds: Mapping[str, float]
    rules: tuple[Mapping[str, Any], ...]

    def to_dict(self) -> dict:
        return {
            "formatVersion": self.format_version,
            "thresholds": dict(self.thresholds),
            "rules": [dict(r) for r in self.rules],
        }

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2) + "\n").encode("utf-8")


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def _substitute(value: Any, thresholds: Mapping[str, float]) -> Any:
    if isinstance(value, str) and value.startswith("$"):
        name = value[1:]
        if name not in thresholds:
            raise UnknownThreshold(f"threshold {value!r} is not defined")
        return thresholds[name]
    return value


def _parse_constraint(raw: Mapping[str, Any], thresholds: Mapping[str, float],
                      where: str) -> AttrConstraint:
    _require(isinstance(raw, dict), f"{where}: constraint must be an object")
    _require("attr" in raw and "op" in raw, f"{where}: constraint needs attr and op")
    op = raw["op"]
    _require(op in COMPARATORS, f"{where}: unknown comparator {op!r}")
    if op in ("absent", "present"):
        _require("value" not in raw and "node" not in raw,
                 f"{where}: {op} constraints carry no operand")
        return AttrConstraint(raw["attr"], op)
    if "node" in raw:
        _require("otherAttr" in raw, f"{where}: cross-node constraint needs otherAttr")
        _require("value" not in raw, f"{where}: cross-node constraint carries no literal")
        return AttrConstraint(raw["attr"], op, other_node=raw["node"],
                              other_attr=raw["otherAttr"])
    _require("value" in raw, f"{where}: {op} constraint needs a value")
    value = _substitute(raw["value"], thresholds)
    _require(isinstance(value, (int, float, bool, str)),
             f"{where}: constraint value {value!r} is not a literal")
    return AttrConstraint(raw["attr"], op, value)


def _parse_pattern(raw: Mapping[str, Any], thresholds: Mapping[str, float],
                   tg: TypeGraph, where: str) -> Pattern:
    _require(isinstance(raw, dict), f"{where}: pattern must be an object")
    nodes = []
    ids = set()
    for n in raw.get("nodes", ()):
        _require("id" in n and "type" in n, f"{where}: pattern node needs id and type")
        _require(n["id"] not in ids, f"{where}: duplicate pattern node id {n['id']!r}")
        ids.add(n["id"])
        _require(tg.has_node_type(n["type"]),
                 f"{where}: unknown node type {n['type']!r}")
        constraints = tuple(
            _parse_constraint(c, thresholds, f"{where}/{n['id']}")
            for c in n.get("constraints", ())
        )
        for c in constraints:
            kind = tg.attribute_kind(n["type"], c.attr)
            _require(kind is not None,
                     f"{where}/{n['id']}: {n['type']} has no attribute {c.attr!r}")
            if c.value is not None and c.op not in ("absent", "present"):
                numeric = isinstance(c.value, (int, float)) and not isinstance(c.value, bool)
                _require(kind_accepts(kind, c.value) or
                         (kind in ("integer", "real") and numeric),
                         f"{where}/{n['id']}: literal {c.value!r} does not fit {kind}")
        nodes.append(PatternNode(n["id"], n["type"], constraints))
    node_types = {n.id: n.type for n in nodes}
    for c_node in nodes:
        for c in c_node.constraints:
            if c.other_node is not None:
                _require(c.other_node in node_types,
                         f"{where}: cross-node constraint references unknown node "
                         f"{c.other_node!r}")
    edges = []
    for e in raw.get("edges", ()):
        _require(all(k in e for k in ("label", "src", "dst")),
                 f"{where}: pattern edge needs label, src, dst")
        _require(e["src"] in node_types and e["dst"] in node_types,
                 f"{where}: edge {e['label']!r} references unknown pattern node")
        _require(tg.has_edge_type(e["label"], node_types[e["src"]], node_types[e["dst"]]),
                 f"{where}: edge type {e['label']}: "
                 f"{node_types[e['src']]}->{node_types[e['dst']]} not in type graph")
        edges.append(PatternEdge(e["label"], e["src"], e["dst"]))
    return Pattern(tuple(nodes), tuple(edges))


def _parse_rule(raw: Mapping[str, Any], thresholds: Mapping[str, float],
                tg: TypeGraph) -> Rule:
    for key in ("id", "faultCode", "message", "lhs"):
        _require(key in raw, f"rule record missing {key!r}")
    rid = raw["id"]
    where = f"rule {rid}"
    code = raw["faultCode"]
    _require(code in RULE_FAULT_CODES or code.startswith("X"),
             f"{where}: fault code {code!r} is neither built-in nor X-prefixed")
    priority = raw.get("priority", 0)
    _require(isinstance(priority, int) and not isinstance(priority, bool),
             f"{where}: priority must be an integer")
    lhs = _parse_pattern(raw["lhs"], thresholds, tg, f"{where}/lhs")
    lhs_ids = set(lhs.node_ids())
    nacs = tuple(
        _parse_pattern(n, thresholds, tg, f"{where}/nac{i}")
        for i, n in enumerate(raw.get("nacs", ()))
    )

    rhs_raw = raw.get("rhs") or {}
    rhs_nodes = []
    rhs_ids = set()
    for n in rhs_raw.get("nodes", ()):
        _require("id" in n and "type" in n, f"{where}/rhs: node needs id and type")
        _require(tg.has_node_type(n["type"]), f"{where}/rhs: unknown type {n['type']!r}")
        _require(n["id"] not in rhs_ids and n["id"] not in lhs_ids,
                 f"{where}/rhs: node id {n['id']!r} clashes")
        rhs_ids.add(n["id"])
        attrs = tuple(sorted(n.get("attrs", {}).items()))
        rhs_nodes.append(RhsNode(n["id"], n["type"], attrs))
    rhs_edges = []
    for e in rhs_raw.get("edges", ()):
        _require(all(k in e for k in ("label", "src", "dst")),
                 f"{where}/rhs: edge needs label, src, dst")
        for endpoint in (e["src"], e["dst"]):
            _require(endpoint in rhs_ids or endpoint in lhs_ids,
                     f"{where}/rhs: edge endpoint {endpoint!r} is unbound")
        rhs_edges.append(RhsEdge(e["label"], e["src"], e["dst"]))
    _require(bool(rhs_nodes), f"{where}: rhs adds nothing; detection rules must add")

    faults = [n for n in rhs_nodes if n.type == FAULT_TYPE]
    _require(len(faults) == 1, f"{where}: rhs must add exactly one Fault node")
    fault_id = faults[0].id
    anchor_targets = [e.dst for e in rhs_edges if e.label == AT_LABEL and e.src == fault_id]
    _require(len(anchor_targets) == 1 and anchor_targets[0] in lhs_ids,
             f"{where}: the Fault node needs one 'at' edge to an lhs node")
    anchor = anchor_targets[0]

    def is_self_nac(nac: Pattern) -> bool:
        for pn in nac.nodes:
            if pn.type != FAULT_TYPE:
                continue
            if not any(c.attr == "code" and c.op == "==" and c.value == code
                       for c in pn.constraints):
                continue
            for pe in nac.edges:
                if pe.label == AT_LABEL and pe.src == pn.id and pe.dst == anchor:
                    return True
        return False

    _require(any(is_self_nac(n) for n in nacs),
             f"{where}: missing self-NAC (Fault code {code} at {anchor!r})")

    return Rule(
        id=rid,
        priority=priority,
        lhs=lhs,
        nacs=nacs,
        rhs_nodes=tuple(rhs_nodes),
        rhs_edges=tuple(rhs_edges),
        fault_code=code,
        message_template=raw["message"],
    )


def parse_document(document: bytes | str) -> RuleDocument:
    try:
        text = document.decode("utf-8") if isinstance(document, bytes) else document
        raw = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"rule document is not UTF-8 JSON: {exc}") from exc
    _require(isinstance(raw, dict), "rule document must be a JSON object")
    _require(raw.get("formatVersion") == FORMAT_VERSION,
             f"formatVersion must be {FORMAT_VERSION!r}")
    thresholds = raw.get("thresholds", {})
    _require(isinstance(thresholds, dict) and
             all(isinstance(v, (int, float)) and not isinstance(v, bool)
                 for v in thresholds.values()),
             "thresholds must map names to numbers")
    rules = raw.get("rules", [])
    _require(isinstance(rules, list) and rules, "document carries no rules")
    return RuleDocument(FORMAT_VERSION, dict(thresholds), tuple(rules))


def load_rules(
    document: bytes | str | RuleDocument,
    tg: TypeGraph = META_MODEL,
    threshold_overrides: Mapping[str, float] | None = None,
) -> list[Rule]:
    """Parse, validate and threshold-substitute a rule document.

    Raises ParseError for malformed JSON, SchemaError for schema or rule
    invariant violations, UnknownThreshold for unresolved "$name" values.
    """
    doc = document if isinstance(document, RuleDocument) else parse_document(document)
    thresholds = dict(doc.thresholds)
    if threshold_overrides:
        thresholds.update(threshold_overrides)
    out = []
    seen_ids = set()
    for raw in doc.rules:
        rule = _parse_rule(raw, thresholds, tg)
        _require(rule.id not in seen_ids, f"duplicate rule id {rule.id!r}")
        seen_ids.add(rule.id)
        out.append(rule)
    return out


# ---------------------------------------------------------------------------
# Built-in catalog
# ---------------------------------------------------------------------------

DEFAULT_THRESHOLDS = {
    "epsFinalMax": 0.2,
    "syncMin": 1,
    "syncMax": 10000,
    "gammaMin": 0.0,
    "gammaMax": 1.0,
}


def _fault_rhs(anchor: str) -> dict:
    return {
        "nodes": [{"id": "fault", "type": "Fault"}],
        "edges": [{"label": "at", "src": "fault", "dst": anchor}],
    }


def _self_nac(code: str, anchor: str, anchor_type: str) -> dict:
    return {
        "nodes": [
            {"id": anchor, "type": anchor_type},
            {"id": "prior", "type": "Fault",
             "constraints": [{"attr": "code", "op": "==", "value": code}]},
        ],
        "edges": [{"label": "at", "src": "prior", "dst": anchor}],
    }


def _rule(rid: str, code: str, message: str, lhs: dict, anchor: str,
          anchor_type: str, extra_nacs: list[dict] | None = None) -> dict:
    return {
        "id": rid,
        "priority": 0,
        "faultCode": code,
        "message": message,
        "lhs": lhs,
        "nacs": (extra_nacs or []) + [_self_nac(code, anchor, anchor_type)],
        "rhs": _fault_rhs(anchor),
    }


_ENV_WITH_STEP_LHS = {
    "nodes": [
        {"id": "prog", "type": "DRLProgram"},
        {"id": "env", "type": "Environment"},
        {"id": "init", "type": "Initialize"},
        {"id": "step", "type": "Step"},
    ],
    "edges": [
        {"label": "hasEnv", "src": "prog", "dst": "env"},
        {"label": "initializedBy", "src": "env", "dst": "init"},
        {"label": "followedBy", "src": "init", "dst": "step"},
    ],
}

_BUILTIN_RULE_RECORDS: list[dict] = [
    _rule(
        "R01", "F01",
        "the environment is initialized but never stepped",
        lhs={
            "nodes": [
                {"id": "prog", "type": "DRLProgram"},
                {"id": "env", "type": "Environment"},
                {"id": "init", "type": "Initialize"},
            ],
            "edges": [
                {"label": "hasEnv", "src": "prog", "dst": "env"},
                {"label": "initializedBy", "src": "env", "dst": "init"},
            ],
        },
        anchor="init", anchor_type="Initialize",
        extra_nacs=[{
            "nodes": [{"id": "init", "type": "Initialize"},
                      {"id": "step", "type": "Step"}],
            "edges": [{"label": "followedBy", "src": "init", "dst": "step"}],
        }],
    ),
    _rule(
        "R02", "F02",
        "this step's episode loop never checks the terminal flag",
        lhs={"nodes": [{"id": "step", "type": "Step"}], "edges": []},
        anchor="step", anchor_type="Step",
        extra_nacs=[{
            "nodes": [{"id": "step", "type": "Step"},
                      {"id": "tc", "type": "TerminalCheck"}],
            "edges": [{"label": "checkedBy", "src": "step", "dst": "tc"}],
        }],
    ),
    _rule(
        "R03a", "F03",
        "the environment is never reset between episodes",
        lhs=_ENV_WITH_STEP_LHS,
        anchor="env", anchor_type="Environment",
        extra_nacs=[{
            "nodes": [{"id": "env", "type": "Environment"},
                      {"id": "reset", "type": "Reset"}],
            "edges": [{"label": "resetBy", "src": "env", "dst": "reset"}],
        }],
    ),
    _rule(
        "R03b", "F03",
        "the environment is never closed at the end of the run",
        lhs=_ENV_WITH_STEP_LHS,
        anchor="env", anchor_type="Environment",
        extra_nacs=[{
            "nodes": [{"id": "env", "type": "Environment"},
                      {"id": "close", "type": "Close"}],
            "edges": [{"label": "closedBy", "src": "env", "dst": "close"}],
        }],
    ),
    _rule(
        "R04", "F04",
        "actions always come from the network; no exploration strategy found",
        lhs={
            "nodes": [{"id": "dqn", "type": "DQN"}, {"id": "qnet", "type": "QNetwork"}],
            "edges": [{"label": "owns", "src": "dqn", "dst": "qnet"}],
        },
        anchor="dqn", anchor_type="DQN",
        extra_nacs=[{
            "nodes": [{"id": "dqn", "type": "DQN"},
                      {"id": "expl", "type": "Exploration"}],
            "edges": [{"label": "explores", "src": "dqn", "dst": "expl"}],
        }],
    ),
    _rule(
        "R05a", "F05",
        "exploration never drops below {expl.epsilonFinal}; the agent keeps acting randomly",
        lhs={
            "nodes": [{"id": "expl", "type": "Exploration",
                       "constraints": [{"attr": "epsilonFinal", "op": ">",
                                        "value": "$epsFinalMax"}]}],
            "edges": [],
        },
        anchor="expl", anchor_type="Exploration",
    ),
    _rule(
        "R05b", "F05",
        "the exploration rate is never decayed",
        lhs={
            "nodes": [{"id": "expl", "type": "Exploration",
                       "constraints": [{"attr": "decay", "op": "absent"}]}],
            "edges": [],
        },
        anchor="expl", anchor_type="Exploration",
    ),
    _rule(
        "R06a", "F06",
        "discount factor {upd.gamma} disables future rewards",
        lhs={
            "nodes": [{"id": "upd", "type": "UpdateRule",
                       "constraints": [{"attr": "gamma", "op": "<=",
                                        "value": "$gammaMin"}]}],
            "edges": [],
        },
        anchor="upd", anchor_type="UpdateRule",
    ),
    _rule(
        "R06b", "F06",
        "discount factor {upd.gamma} exceeds 1; value estimates will diverge",
        lhs={
            "nodes": [{"id": "upd", "type": "UpdateRule",
                       "constraints": [{"attr": "gamma", "op": ">",
                                        "value": "$gammaMax"}]}],
            "edges": [],
        },
        anchor="upd", anchor_type="UpdateRule",
    ),
    _rule(
        "R06c", "F06",
        "the training target misses the max over next-state action values",
        lhs={
            "nodes": [{"id": "upd", "type": "UpdateRule",
                       "constraints": [{"attr": "hasMaxTerm", "op": "==",
                                        "value": False}]}],
            "edges": [],
        },
        anchor="upd", anchor_type="UpdateRule",
    ),
    _rule(
        "R07a", "F07",
        "target network syncs every {tgt.syncFrequency} steps; that is more than once per step",
        lhs={
            "nodes": [{"id": "tgt", "type": "TargetNetwork",
                       "constraints": [{"attr": "syncFrequency", "op": "<",
                                        "value": "$syncMin"}]}],
            "edges": [],
        },
        anchor="tgt", anchor_type="TargetNetwork",
    ),
    _rule(
        "R07b", "F07",
        "target network syncs only every {tgt.syncFrequency} steps; targets will go stale",
        lhs={
            "nodes": [{"id": "tgt", "type": "TargetNetwork",
                       "constraints": [{"attr": "syncFrequency", "op": ">",
                                        "value": "$syncMax"}]}],
            "edges": [],
        },
        anchor="tgt", anchor_type="TargetNetwork",
    ),
    _rule(
        "R08", "F08",
        "a target network exists but never receives the online network's weights",
        lhs={
            "nodes": [{"id": "dqn", "type": "DQN"},
                      {"id": "tgt", "type": "TargetNetwork"}],
            "edges": [{"label": "owns", "src": "dqn", "dst": "tgt"}],
        },
        anchor="tgt", anchor_type="TargetNetwork",
        extra_nacs=[{
            "nodes": [{"id": "tgt", "type": "TargetNetwork"},
                      {"id": "qnet", "type": "QNetwork"}],
            "edges": [{"label": "syncsTo", "src": "qnet", "dst": "tgt"}],
        }],
    ),
    _rule(
        "R10", "F10",
        "output layer has {qnet.outputDim} units but the environment exposes "
        "{env.numActions} actions",
        lhs={
            "nodes": [
                {"id": "prog", "type": "DRLProgram"},
                {"id": "env", "type": "Environment",
                 "constraints": [{"attr": "numActions", "op": "present"}]},
                {"id": "dqn", "type": "DQN"},
                {"id": "qnet", "type": "QNetwork",
                 "constraints": [{"attr": "outputDim", "op": "!=",
                                  "node": "env", "otherAttr": "numActions"}]},
            ],
            "edges": [
                {"label": "hasEnv", "src": "prog", "dst": "env"},
                {"label": "hasAgent", "src": "prog", "dst": "dqn"},
                {"label": "owns", "src": "dqn", "dst": "qnet"},
            ],
        },
        anchor="qnet", anchor_type="QNetwork",
    ),
]

for _suffix, _activation in (("a", "sigmoid"), ("b", "tanh"), ("c", "softmax")):
    _BUILTIN_RULE_RECORDS.append(_rule(
        f"R11{_suffix}", "F11",
        "output layer uses {qnet.outputActivation}; Q-values must not be squashed",
        lhs={
            "nodes": [{"id": "qnet", "type": "QNetwork",
                       "constraints": [{"attr": "outputActivation", "op": "==",
                                        "value": _activation}]}],
            "edges": [],
        },
        anchor="qnet", anchor_type="QNetwork",
    ))


def builtin_catalog() -> RuleDocument:
    """The shipped detection catalog: ten fault codes over 17 rule records."""
    return RuleDocument(
        FORMAT_VERSION,
        dict(DEFAULT_THRESHOLDS),
        tuple(json.loads(json.dumps(r)) for r in _BUILTIN_RULE_RECORDS),
    )


def builtin_rules_path_bytes() -> bytes:
    """The catalog as shipped in the distribution's data directory."""
    return resources.files("drlint.data").joinpath(BUILTIN_RULES_RESOURCE).read_bytes()


def load_builtin_rules(threshold_overrides: Mapping[str, float] | None = None) -> list[Rule]:
    return load_rules(builtin_catalog(), META_MODEL, threshold_overrides)
