"""Pattern matching and rule execution over model graphs.

Detection rules are additive: each firing instantiates the rule's RHS
(always containing one Fault node) on top of the host graph. A rule's NACs
block firing whenever any of them can be extended from the matched nodes to
an occurrence in the host; every rule carries a self-NAC over its own fault
code so each (rule, location) fires at most once and fixpoint execution is
idempotent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence

from .graph import (
    AttrValue,
    Edge,
    FAULT_TYPE,
    FLAGGED_LABEL,
    MissingProgramNode,
    ModelGraph,
    Node,
    PROGRAM_TYPE,
)


class EngineError(Exception):
    """Base error for rule execution."""


class NacViolated(EngineError):
    """A negative application condition holds an occurrence in the host."""


class InvalidMatch(EngineError):
    """The match no longer embeds into the host graph."""


class IterationBudgetExceeded(EngineError):
    """Defensive bound on total rule firings was exceeded."""


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------

COMPARATORS = ("==", "!=", "<", "<=", ">", ">=", "absent", "present")
_ORDERING = ("<", "<=", ">", ">=")


@dataclass(frozen=True)
class AttrConstraint:
    """One attribute condition on a pattern node.

    Unary form compares the node's attribute against ``value``; the binary
    form (``other_node`` set) compares it against another pattern node's
    attribute and requires both to be present.
    """

    attr: str
    op: str
    value: AttrValue | None = None
    other_node: str | None = None
    other_attr: str | None = None


@dataclass(frozen=True)
class PatternNode:
    id: str
    type: str
    constraints: tuple[AttrConstraint, ...] = ()


@dataclass(frozen=True)
class PatternEdge:
    label: str
    src: str
    dst: str


@dataclass(frozen=True)
class Pattern:
    nodes: tuple[PatternNode, ...] = ()
    edges: tuple[PatternEdge, ...] = ()

    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)


@dataclass(frozen=True)
class RhsNode:
    id: str
    type: str
    attrs: tuple[tuple[str, AttrValue], ...] = ()


@dataclass(frozen=True)
class RhsEdge:
    label: str
    src: str
    dst: str


@dataclass(frozen=True)
class Rule:
    id: str
    priority: int
    lhs: Pattern
    nacs: tuple[Pattern, ...]
    rhs_nodes: tuple[RhsNode, ...]
    rhs_edges: tuple[RhsEdge, ...]
    fault_code: str
    message_template: str


@dataclass(frozen=True)
class Match:
    """Injective, structure- and constraint-preserving pattern embedding."""

    mapping: tuple[tuple[str, int], ...]
    rule_id: str = ""

    def as_dict(self) -> dict[str, int]:
        return dict(self.mapping)

    def host_ids(self) -> tuple[int, ...]:
        return tuple(h for _, h in sorted(self.mapping))


@dataclass(frozen=True)
class Firing:
    """One rule application, for trace output and report stats."""

    rule_id: str
    fault_code: str
    host_ids: tuple[int, ...]


# ---------------------------------------------------------------------------
# Constraint evaluation
# ---------------------------------------------------------------------------


def _comparable(a: AttrValue, b: AttrValue) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool)
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return True
    return isinstance(a, str) and isinstance(b, str)


def _compare(op: str, a: AttrValue, b: AttrValue) -> bool:
    if not _comparable(a, b):
        return False
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op not in _ORDERING:
        raise EngineError(f"unknown comparator {op!r}")
    # Ordering is only defined between numbers.
    if isinstance(a, bool) or not isinstance(a, (int, float)):
        return False
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def constraint_holds(c: AttrConstraint, attrs: dict, other_attrs: dict | None = None) -> bool:
    if c.op == "absent":
        return c.attr not in attrs
    if c.op == "present":
        return c.attr in attrs
    if c.other_node is not None:
        if other_attrs is None:
            return False
        if c.attr not in attrs or (c.other_attr or "") not in other_attrs:
            return False
        return _compare(c.op, attrs[c.attr], other_attrs[c.other_attr or ""])
    if c.attr not in attrs:
        return False
    return _compare(c.op, attrs[c.attr], c.value)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------


def _node_candidates(pnode: PatternNode, host: ModelGraph) -> list[int]:
    out = []
    for hid in host.nodes_of_type(pnode.type):
        attrs = dict(host.node(hid).attrs)
        ok = True
        for c in pnode.constraints:
            if c.other_node is not None:
                continue  # binary constraints wait for both endpoints
            if not constraint_holds(c, attrs):
                ok = False
                break
        if ok:
            out.append(hid)
    return out


def _extend(
    pattern: Pattern,
    host: ModelGraph,
    order: Sequence[PatternNode],
    idx: int,
    assignment: dict[str, int],
    used: set[int],
    found: Callable[[dict[str, int]], bool],
) -> bool:
    """Depth-first injective extension; returns True if the search was cut short."""
    if idx == len(order):
        return found(dict(assignment))
    pnode = order[idx]
    for hid in _node_candidates(pnode, host):
        if hid in used:
            continue
        assignment[pnode.id] = hid
        if _partial_ok(pattern, host, assignment, pnode.id):
            used.add(hid)
            if _extend(pattern, host, order, idx + 1, assignment, used, found):
                used.discard(hid)
                del assignment[pnode.id]
                return True
            used.discard(hid)
        del assignment[pnode.id]
    return False


def _partial_ok(pattern: Pattern, host: ModelGraph, assignment: dict[str, int],
                just_added: str) -> bool:
    for pe in pattern.edges:
        if pe.src in assignment and pe.dst in assignment:
            if just_added not in (pe.src, pe.dst):
                continue
            if not host.has_edge(pe.label, assignment[pe.src], assignment[pe.dst]):
                return False
    by_id = {n.id: n for n in pattern.nodes}
    for pid in (just_added,):
        for c in by_id[pid].constraints:
            if c.other_node is not None and c.other_node in assignment:
                if not constraint_holds(
                    c, dict(host.node(assignment[pid]).attrs),
                    dict(host.node(assignment[c.other_node]).attrs),
                ):
                    return False
    # A newly assigned node may satisfy the "other" side of a binary constraint.
    for pn in pattern.nodes:
        if pn.id == just_added or pn.id not in assignment:
            continue
        for c in pn.constraints:
            if c.other_node == just_added:
                if not constraint_holds(
                    c, dict(host.node(assignment[pn.id]).attrs),
                    dict(host.node(assignment[just_added]).attrs),
                ):
                    return False
    return True


def find_matches(pattern: Pattern, host: ModelGraph, rule_id: str = "") -> list[Match]:
    """All injective embeddings of ``pattern`` into ``host``.

    Result order is total and deterministic: matches sort lexicographically
    by the tuple of host node ids keyed by sorted pattern node id. The empty
    pattern yields exactly one empty match.
    """
    order = sorted(pattern.nodes, key=lambda n: n.id)
    results: list[dict[str, int]] = []

    def collect(a: dict[str, int]) -> bool:
        results.append(a)
        return False

    _extend(pattern, host, order, 0, {}, set(), collect)
    keys = [n.id for n in order]
    results.sort(key=lambda a: tuple(a[k] for k in keys))
    return [Match(tuple(sorted(a.items())), rule_id) for a in results]


def nac_holds(match: Match, nac: Pattern, host: ModelGraph) -> bool:
    """True iff the NAC cannot be extended from the match into the host.

    Pattern node ids shared between the NAC and the rule's LHS are glue
    points: they are pinned to the match's images (and must still satisfy the
    NAC's own type and constraints there). The remaining NAC nodes are bound
    injectively. A successful extension means the forbidden structure exists,
    so the NAC does not hold and the rule must not fire.
    """
    bound = match.as_dict()
    assignment: dict[str, int] = {}
    used: set[int] = set()
    rest: list[PatternNode] = []
    for pn in nac.nodes:
        if pn.id in bound:
            hid = bound[pn.id]
            hnode = host.node(hid)
            if hnode.type != pn.type:
                return True
            for c in pn.constraints:
                if c.other_node is not None:
                    if c.other_node not in bound:
                        continue  # deferred until the free node is assigned
                    ok = constraint_holds(c, dict(hnode.attrs),
                                          dict(host.node(bound[c.other_node]).attrs))
                else:
                    ok = constraint_holds(c, dict(hnode.attrs))
                if not ok:
                    return True
            if hid in used:
                return True  # glue collision: not an injective occurrence
            assignment[pn.id] = hid
            used.add(hid)
        else:
            rest.append(pn)
    for pe in nac.edges:
        if pe.src in assignment and pe.dst in assignment:
            if not host.has_edge(pe.label, assignment[pe.src], assignment[pe.dst]):
                return True

    hit = _extend(nac, host, sorted(rest, key=lambda n: n.id), 0,
                  assignment, used, lambda a: True)
    return not hit


# ---------------------------------------------------------------------------
# Application
# ---------------------------------------------------------------------------

_PLACEHOLDER = re.compile(r"\{([A-Za-z_][A-Za-z_0-9]*)\.([A-Za-z_][A-Za-z_0-9]*)\}")


def render_message(template: str, match: Match, host: ModelGraph) -> str:
    """Substitute ``{patternNode.attr}`` placeholders with matched values."""
    mapping = match.as_dict()

    def sub(m: re.Match) -> str:
        pid, attr = m.group(1), m.group(2)
        if pid not in mapping:
            return "?"
        node = host.node(mapping[pid])
        if attr == "line":
            return "?" if node.line is None else str(node.line)
        value = node.attrs.get(attr)
        return "?" if value is None else str(value)

    return _PLACEHOLDER.sub(sub, template)


def match_still_embeds(rule: Rule, match: Match, host: ModelGraph) -> bool:
    mapping = match.as_dict()
    if set(mapping) != set(rule.lhs.node_ids()):
        return False
    if len(set(mapping.values())) != len(mapping):
        return False
    for pn in rule.lhs.nodes:
        hid = mapping[pn.id]
        if not host.has_node(hid):
            return False
        hnode = host.node(hid)
        if hnode.type != pn.type:
            return False
        for c in pn.constraints:
            other = (dict(host.node(mapping[c.other_node]).attrs)
                     if c.other_node is not None else None)
            if not constraint_holds(c, dict(hnode.attrs), other):
                return False
    for pe in rule.lhs.edges:
        if not host.has_edge(pe.label, mapping[pe.src], mapping[pe.dst]):
            return False
    return True


def apply_rule(rule: Rule, match: Match, host: ModelGraph) -> ModelGraph:
    """Instantiate the rule's RHS on ``host`` at ``match``.

    Fault nodes receive the rule's fault code and rendered message, inherit
    the source anchor of the node their ``at`` edge points to, and are
    flagged from the program root automatically.
    """
    if not match_still_embeds(rule, match, host):
        raise InvalidMatch(f"{rule.id}: match no longer embeds in host")
    for nac in rule.nacs:
        if not nac_holds(match, nac, host):
            raise NacViolated(f"{rule.id}: a NAC has an occurrence in the host")

    mapping = match.as_dict()
    new_nodes: list[Node] = []
    new_node_ids: dict[str, int] = {}
    next_nid = host.next_node_id()
    anchors: dict[str, int] = {}
    for re_ in rule.rhs_edges:
        if re_.label == "at" and re_.dst in mapping:
            anchors[re_.src] = mapping[re_.dst]

    for rn in rule.rhs_nodes:
        attrs = dict(rn.attrs)
        line = None
        if rn.type == FAULT_TYPE:
            attrs.setdefault("code", rule.fault_code)
            attrs.setdefault("message", render_message(rule.message_template, match, host))
            if rn.id in anchors:
                line = host.node(anchors[rn.id]).line
        new_node_ids[rn.id] = next_nid
        new_nodes.append(Node(next_nid, rn.type, attrs, line))
        next_nid += 1

    def resolve(endpoint: str) -> int:
        if endpoint in new_node_ids:
            return new_node_ids[endpoint]
        if endpoint in mapping:
            return mapping[endpoint]
        raise InvalidMatch(f"{rule.id}: rhs edge endpoint {endpoint!r} is unbound")

    new_edges: list[Edge] = []
    next_eid = host.next_edge_id()
    explicit_flags = set()
    for re_ in rule.rhs_edges:
        src, dst = resolve(re_.src), resolve(re_.dst)
        if re_.label == FLAGGED_LABEL:
            explicit_flags.add(dst)
        new_edges.append(Edge(next_eid, re_.label, src, dst))
        next_eid += 1

    roots = host.nodes_of_type(PROGRAM_TYPE)
    for rn in rule.rhs_nodes:
        if rn.type == FAULT_TYPE and new_node_ids[rn.id] not in explicit_flags:
            if not roots:
                raise MissingProgramNode("cannot flag a fault: no DRLProgram node")
            new_edges.append(Edge(next_eid, FLAGGED_LABEL, roots[0], new_node_ids[rn.id]))
            next_eid += 1

    return host.with_additions(new_nodes, new_edges)


# ---------------------------------------------------------------------------
# Fixpoint execution
# ---------------------------------------------------------------------------


def rule_order(rules: Sequence[Rule]) -> list[Rule]:
    return sorted(rules, key=lambda r: (-r.priority, r.id))


def run_to_fixpoint(
    rules: Sequence[Rule],
    host: ModelGraph,
    firings: list[Firing] | None = None,
) -> ModelGraph:
    """Apply rules until none has an applicable firing; return the final graph.

    Rules are tried in descending priority (rule id breaks ties), matches in
    :func:`find_matches` order, and after every firing the scan restarts from
    the highest-priority rule. The firing budget |rules| * |host nodes|^2 is a
    defensive bound only: the mandatory self-NACs cap each (rule, location)
    at one firing.
    """
    ordered = rule_order(rules)
    budget = len(rules) * len(host.nodes) ** 2
    fired = 0
    g = host
    progressing = True
    while progressing:
        progressing = False
        for rule in ordered:
            applied = False
            for match in find_matches(rule.lhs, g, rule.id):
                if all(nac_holds(match, nac, g) for nac in rule.nacs):
                    if fired >= budget:
                        raise IterationBudgetExceeded(
                            f"exceeded {budget} firings; a rule is missing its self-NAC?")
                    g = apply_rule(rule, match, g)
                    fired += 1
                    if firings is not None:
                        firings.append(Firing(rule.id, rule.fault_code, match.host_ids()))
                    applied = True
                    break
            if applied:
                progressing = True
                break
    return g
