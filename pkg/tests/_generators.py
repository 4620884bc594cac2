"""Seeded random hosts and patterns typed by the meta-model."""

from __future__ import annotations

import random

from drlint.engine import AttrConstraint, Pattern, PatternEdge, PatternNode
from drlint.graph import Edge, META_MODEL, ModelGraph, Node, PROGRAM_TYPE

_TYPES = sorted(META_MODEL.node_types)
_EDGE_TYPES = [(et.label, et.src, et.dst) for et in META_MODEL.edge_types]

_SAMPLE_VALUES = {
    "integer": (0, 1, 2, 3, 100, 10000),
    "real": (0.0, 0.1, 0.5, 0.95, 1.0, 1.5),
    "boolean": (True, False),
    "string": ("linear", "sigmoid", "relu", "F05", "msg"),
}


def random_host(rng: random.Random, max_nodes: int = 8) -> ModelGraph:
    n = rng.randint(0, max_nodes)
    nodes = []
    have_program = False
    for i in range(1, n + 1):
        node_type = rng.choice(_TYPES)
        if node_type == PROGRAM_TYPE:
            if have_program:
                node_type = "Step"
            have_program = True
        attrs = {}
        for attr, kind in META_MODEL.attributes_of(node_type).items():
            if rng.random() < 0.6:
                attrs[attr] = rng.choice(_SAMPLE_VALUES[kind])
        nodes.append(Node(i, node_type, attrs, line=rng.randint(1, 40)))
    by_type: dict[str, list[int]] = {}
    for node in nodes:
        by_type.setdefault(node.type, []).append(node.id)
    edges = []
    seen = set()
    eid = 0
    for _ in range(rng.randint(0, 2 * max(1, n))):
        label, src_t, dst_t = rng.choice(_EDGE_TYPES)
        if not by_type.get(src_t) or not by_type.get(dst_t):
            continue
        src = rng.choice(by_type[src_t])
        dst = rng.choice(by_type[dst_t])
        if (label, src, dst) in seen:
            continue
        seen.add((label, src, dst))
        eid += 1
        edges.append(Edge(eid, label, src, dst))
    return ModelGraph(nodes, edges)


def random_pattern(rng: random.Random, max_nodes: int = 4) -> Pattern:
    n = rng.randint(0, max_nodes)
    pnodes = []
    for i in range(n):
        node_type = rng.choice(_TYPES)
        constraints = []
        schema = META_MODEL.attributes_of(node_type)
        for attr, kind in schema.items():
            roll = rng.random()
            if roll < 0.15:
                constraints.append(AttrConstraint(attr, rng.choice(("absent", "present"))))
            elif roll < 0.35:
                op = rng.choice(("==", "!=", "<", "<=", ">", ">="))
                constraints.append(AttrConstraint(attr, op, rng.choice(_SAMPLE_VALUES[kind])))
        pnodes.append(PatternNode(f"p{i}", node_type, tuple(constraints)))
    # A couple of cross-node comparisons over integer attributes.
    int_holders = [p for p in pnodes
                   if any(k == "integer" for k in META_MODEL.attributes_of(p.type).values())]
    if len(int_holders) >= 2 and rng.random() < 0.3:
        a, b = rng.sample(int_holders, 2)
        attr_a = next(k for k, v in META_MODEL.attributes_of(a.type).items() if v == "integer")
        attr_b = next(k for k, v in META_MODEL.attributes_of(b.type).items() if v == "integer")
        extra = AttrConstraint(attr_a, rng.choice(("==", "!=", "<", ">")),
                               other_node=b.id, other_attr=attr_b)
        pnodes = [PatternNode(p.id, p.type, p.constraints + (extra,)) if p is a else p
                  for p in pnodes]
    types = {p.id: p.type for p in pnodes}
    pedges = []
    seen = set()
    for _ in range(rng.randint(0, n)):
        compatible = [(label, s, d)
                      for label, st, dt in _EDGE_TYPES
                      for s in types for d in types
                      if types[s] == st and types[d] == dt and s != d]
        if not compatible:
            break
        label, s, d = rng.choice(compatible)
        if (label, s, d) in seen:
            continue
        seen.add((label, s, d))
        pedges.append(PatternEdge(label, s, d))
    return Pattern(tuple(pnodes), tuple(pedges))
