"""Typed attributed graphs and the DQN program meta-model.

A TypeGraph declares the permitted node types, labelled edges between them,
and per-type attribute schemas. A ModelGraph is an instance graph: the model
of one training script, checked against its governing TypeGraph by
``conforms_to``. Both are immutable after construction and safe to share.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

AttrValue = Union[int, float, bool, str]

ATTR_KINDS = ("integer", "real", "boolean", "string")


class GraphError(Exception):
    """Base error for graph construction problems."""


class MissingProgramNode(GraphError):
    """Raised when an operation needs the program root node and none exists."""


def attr_kind_of(value: AttrValue) -> str:
    # bool is an int subclass; test it first.
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "real"
    if isinstance(value, str):
        return "string"
    raise GraphError(f"unsupported attribute value {value!r}")


def kind_accepts(kind: str, value: AttrValue) -> bool:
    actual = attr_kind_of(value)
    if kind == "real":
        # An integer literal is an acceptable real value.
        return actual in ("real", "integer")
    return actual == kind


# ---------------------------------------------------------------------------
# Type graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeType:
    label: str
    src: str
    dst: str


class TypeGraph:
    """Vocabulary of node types, edge types and attribute schemas."""

    def __init__(
        self,
        node_types: Iterable[str],
        edge_types: Iterable[tuple[str, str, str]],
        attribute_schema: Mapping[str, Mapping[str, str]] | None = None,
        singleton_types: Iterable[str] = (),
    ) -> None:
        self.node_types = frozenset(node_types)
        edges = []
        seen = set()
        for label, src, dst in edge_types:
            if src not in self.node_types or dst not in self.node_types:
                raise GraphError(f"edge type {label}: {src}->{dst} names an undeclared node type")
            key = (label, src, dst)
            if key in seen:
                raise GraphError(f"duplicate edge type {key}")
            seen.add(key)
            edges.append(EdgeType(label, src, dst))
        self.edge_types = tuple(edges)
        self._edge_index = seen
        self._edge_labels = frozenset(e.label for e in edges)
        schema: dict[str, dict[str, str]] = {}
        for node_type, attrs in (attribute_schema or {}).items():
            if node_type not in self.node_types:
                raise GraphError(f"attribute schema for undeclared node type {node_type}")
            for name, kind in attrs.items():
                if kind not in ATTR_KINDS:
                    raise GraphError(f"unknown attribute kind {kind!r} for {node_type}.{name}")
            schema[node_type] = dict(attrs)
        self._schema = schema
        self.singleton_types = frozenset(singleton_types)
        for t in self.singleton_types:
            if t not in self.node_types:
                raise GraphError(f"singleton constraint names undeclared node type {t}")

    def has_node_type(self, node_type: str) -> bool:
        return node_type in self.node_types

    def has_edge_type(self, label: str, src_type: str, dst_type: str) -> bool:
        return (label, src_type, dst_type) in self._edge_index

    def has_edge_label(self, label: str) -> bool:
        return label in self._edge_labels

    def attribute_kind(self, node_type: str, attr: str) -> str | None:
        return self._schema.get(node_type, {}).get(attr)

    def attributes_of(self, node_type: str) -> Mapping[str, str]:
        return dict(self._schema.get(node_type, {}))


# ---------------------------------------------------------------------------
# Model graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    id: int
    type: str
    attrs: Mapping[str, AttrValue] = field(default_factory=dict)
    line: int | None = None


@dataclass(frozen=True)
class Edge:
    id: int
    label: str
    src: int
    dst: int


class ModelGraph:
    """Attributed instance graph of one linted program.

    Structural integrity (unique ids, edges joining existing nodes) is
    enforced at construction; typing against the governing TypeGraph is
    reported by :func:`conforms_to` rather than raised, so ill-typed graphs
    can be built and examined.
    """

    def __init__(self, nodes: Iterable[Node] = (), edges: Iterable[Edge] = ()) -> None:
        node_map: dict[int, Node] = {}
        for n in nodes:
            if n.id in node_map:
                raise GraphError(f"duplicate node id {n.id}")
            node_map[n.id] = n
        edge_map: dict[int, Edge] = {}
        for e in edges:
            if e.id in edge_map:
                raise GraphError(f"duplicate edge id {e.id}")
            if e.src not in node_map or e.dst not in node_map:
                raise GraphError(f"edge {e.id} ({e.label}) joins missing node(s)")
            edge_map[e.id] = e
        self._nodes = dict(sorted(node_map.items()))
        self._edges = dict(sorted(edge_map.items()))
        self._edge_keys = {(e.label, e.src, e.dst) for e in self._edges.values()}
        by_type: dict[str, list[int]] = {}
        for n in self._nodes.values():
            by_type.setdefault(n.type, []).append(n.id)
        self._by_type = {t: tuple(ids) for t, ids in by_type.items()}

    # -- read access --------------------------------------------------------

    @property
    def nodes(self) -> tuple[Node, ...]:
        return tuple(self._nodes.values())

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._edges.values())

    def node(self, node_id: int) -> Node:
        return self._nodes[node_id]

    def has_node(self, node_id: int) -> bool:
        return node_id in self._nodes

    def nodes_of_type(self, node_type: str) -> tuple[int, ...]:
        return self._by_type.get(node_type, ())

    def has_edge(self, label: str, src: int, dst: int) -> bool:
        return (label, src, dst) in self._edge_keys

    def out_edges(self, src: int, label: str | None = None) -> tuple[Edge, ...]:
        return tuple(
            e for e in self._edges.values()
            if e.src == src and (label is None or e.label == label)
        )

    def next_node_id(self) -> int:
        return max(self._nodes, default=0) + 1

    def next_edge_id(self) -> int:
        return max(self._edges, default=0) + 1

    def with_additions(self, nodes: Iterable[Node] = (), edges: Iterable[Edge] = ()) -> "ModelGraph":
        return ModelGraph(list(self._nodes.values()) + list(nodes),
                          list(self._edges.values()) + list(edges))

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        nodes = []
        for n in self._nodes.values():
            entry: dict = {"id": n.id, "type": n.type,
                           "attrs": {k: n.attrs[k] for k in sorted(n.attrs)}}
            if n.line is not None:
                entry["line"] = n.line
            nodes.append(entry)
        edges = [{"id": e.id, "label": e.label, "src": e.src, "dst": e.dst}
                 for e in self._edges.values()]
        return {"nodes": nodes, "edges": edges}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ModelGraph":
        nodes = [Node(int(n["id"]), str(n["type"]), dict(n.get("attrs", {})),
                      int(n["line"]) if "line" in n else None)
                 for n in doc.get("nodes", ())]
        edges = [Edge(int(e["id"]), str(e["label"]), int(e["src"]), int(e["dst"]))
                 for e in doc.get("edges", ())]
        return cls(nodes, edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModelGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __repr__(self) -> str:
        return f"ModelGraph({len(self._nodes)} nodes, {len(self._edges)} edges)"


# ---------------------------------------------------------------------------
# Conformance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConformanceViolation:
    element: str      # "node:<id>" or "edge:<id>"
    constraint: str   # short machine name of the broken constraint
    detail: str

    def __str__(self) -> str:
        return f"{self.element}: {self.constraint}: {self.detail}"


def conforms_to(host: ModelGraph, tg: TypeGraph) -> list[ConformanceViolation]:
    """Return every typing violation of ``host`` under ``tg`` (empty = conformant).

    Deterministic and independent of construction order: elements are visited
    in id order.
    """
    out: list[ConformanceViolation] = []
    for n in host.nodes:
        if not tg.has_node_type(n.type):
            out.append(ConformanceViolation(f"node:{n.id}", "unknown-node-type", n.type))
            continue
        for attr in sorted(n.attrs):
            kind = tg.attribute_kind(n.type, attr)
            if kind is None:
                out.append(ConformanceViolation(
                    f"node:{n.id}", "undeclared-attribute", f"{n.type}.{attr}"))
            elif not kind_accepts(kind, n.attrs[attr]):
                out.append(ConformanceViolation(
                    f"node:{n.id}", "attribute-kind",
                    f"{n.type}.{attr} expects {kind}, got {attr_kind_of(n.attrs[attr])}"))
    for e in host.edges:
        src_t = host.node(e.src).type
        dst_t = host.node(e.dst).type
        if not tg.has_edge_label(e.label):
            out.append(ConformanceViolation(f"edge:{e.id}", "unknown-edge-label", e.label))
        elif not tg.has_edge_type(e.label, src_t, dst_t):
            out.append(ConformanceViolation(
                f"edge:{e.id}", "edge-direction",
                f"{e.label}: {src_t}->{dst_t} not declared"))
    for t in sorted(tg.singleton_types):
        ids = host.nodes_of_type(t)
        if len(ids) > 1:
            out.append(ConformanceViolation(
                f"node:{ids[1]}", "singleton-type", f"more than one {t} node"))
    return out


def add_fault_node(host: ModelGraph, code: str, message: str,
                   anchor: int | None = None) -> ModelGraph:
    """Return ``host`` plus one Fault node flagged from the program root.

    Never removes or mutates existing elements. Raises MissingProgramNode if
    the graph has no program root to hang the flag on.
    """
    roots = host.nodes_of_type(PROGRAM_TYPE)
    if not roots:
        raise MissingProgramNode("graph has no DRLProgram node")
    fault = Node(host.next_node_id(), FAULT_TYPE, {"code": code, "message": message}, anchor)
    flag = Edge(host.next_edge_id(), FLAGGED_LABEL, roots[0], fault.id)
    return host.with_additions([fault], [flag])


# ---------------------------------------------------------------------------
# The DQN program meta-model
# ---------------------------------------------------------------------------

PROGRAM_TYPE = "DRLProgram"
FAULT_TYPE = "Fault"
FLAGGED_LABEL = "flagged"
AT_LABEL = "at"

_NODE_TYPES = (
    "DRLProgram", "Environment", "Initialize", "Step", "TerminalCheck",
    "Reset", "Close", "DQN", "QNetwork", "TargetNetwork", "Exploration",
    "Hyperparameters", "UpdateRule", "Fault",
)

_EDGE_TYPES = [
    ("hasEnv", "DRLProgram", "Environment"),
    ("hasAgent", "DRLProgram", "DQN"),
    ("initializedBy", "Environment", "Initialize"),
    ("followedBy", "Initialize", "Step"),
    ("next", "Step", "Step"),
    ("checkedBy", "Step", "TerminalCheck"),
    ("resetBy", "Environment", "Reset"),
    ("closedBy", "Environment", "Close"),
    ("feedsState", "Step", "QNetwork"),
    ("yieldsAction", "QNetwork", "Step"),
    ("owns", "DQN", "QNetwork"),
    ("owns", "DQN", "TargetNetwork"),
    ("providesTargets", "TargetNetwork", "QNetwork"),
    ("syncsTo", "QNetwork", "TargetNetwork"),
    ("explores", "DQN", "Exploration"),
    ("configuredBy", "DQN", "Hyperparameters"),
    ("trainedBy", "QNetwork", "UpdateRule"),
    ("flagged", "DRLProgram", "Fault"),
]
# Fault nodes anchor to the element they flag; declared for every carrier type.
_EDGE_TYPES += [(AT_LABEL, FAULT_TYPE, t) for t in _NODE_TYPES if t != FAULT_TYPE]

_ATTRIBUTE_SCHEMA = {
    "Environment": {"numActions": "integer", "numStates": "integer"},
    "QNetwork": {"outputDim": "integer", "outputActivation": "string"},
    "TargetNetwork": {"syncFrequency": "integer"},
    "Exploration": {"epsilon": "real", "epsilonFinal": "real", "decay": "real"},
    "Hyperparameters": {"batchSize": "integer", "epochs": "integer",
                        "replayBufferSize": "integer"},
    "UpdateRule": {"gamma": "real", "hasMaxTerm": "boolean"},
    "Fault": {"code": "string", "message": "string"},
}

#: The fixed meta-model every extracted program graph is typed by.
META_MODEL = TypeGraph(
    node_types=_NODE_TYPES,
    edge_types=_EDGE_TYPES,
    attribute_schema=_ATTRIBUTE_SCHEMA,
    singleton_types=(PROGRAM_TYPE,),
)
