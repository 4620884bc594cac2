"""Independent oracles the engine is checked against.

Everything here is deliberately naive: exhaustive enumeration over injective
mappings, straight-line constraint evaluation, and a base-graph rule
simulation that exploits the catalog's additive/self-NAC discipline. None of
it shares logic with the engine beyond the data types.
"""

from __future__ import annotations

from itertools import permutations

from drlint.engine import Pattern, Rule
from drlint.graph import FAULT_TYPE, ModelGraph


def _oracle_compare(op: str, a, b) -> bool:
    def kind(v):
        if isinstance(v, bool):
            return "bool"
        if isinstance(v, (int, float)):
            return "num"
        return "str"
    if kind(a) != kind(b):
        return False
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if kind(a) != "num":
        return False
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]


def _oracle_constraints_ok(pattern: Pattern, host: ModelGraph,
                           mapping: dict[str, int]) -> bool:
    for pn in pattern.nodes:
        node = host.node(mapping[pn.id])
        if node.type != pn.type:
            return False
        for c in pn.constraints:
            if c.op == "absent":
                if c.attr in node.attrs:
                    return False
                continue
            if c.op == "present":
                if c.attr not in node.attrs:
                    return False
                continue
            if c.other_node is not None:
                other = host.node(mapping[c.other_node])
                if c.attr not in node.attrs or c.other_attr not in other.attrs:
                    return False
                if not _oracle_compare(c.op, node.attrs[c.attr],
                                       other.attrs[c.other_attr]):
                    return False
                continue
            if c.attr not in node.attrs:
                return False
            if not _oracle_compare(c.op, node.attrs[c.attr], c.value):
                return False
    for pe in pattern.edges:
        if not host.has_edge(pe.label, mapping[pe.src], mapping[pe.dst]):
            return False
    return True


def brute_force_matches(pattern: Pattern, host: ModelGraph) -> set[frozenset]:
    """Every injective pattern embedding, as a set of frozen mappings."""
    pids = sorted(n.id for n in pattern.nodes)
    host_ids = [n.id for n in host.nodes]
    found = set()
    if not pids:
        return {frozenset()}
    for combo in permutations(host_ids, len(pids)):
        mapping = dict(zip(pids, combo))
        if _oracle_constraints_ok(pattern, host, mapping):
            found.add(frozenset(mapping.items()))
    return found


def brute_force_nac_blocked(nac: Pattern, host: ModelGraph,
                            match: dict[str, int]) -> bool:
    """True iff the NAC extends from the match into the host (rule blocked)."""
    glue = {pid: hid for pid, hid in match.items()
            if pid in {n.id for n in nac.nodes}}
    free = sorted(n.id for n in nac.nodes if n.id not in glue)
    candidates = [n.id for n in host.nodes if n.id not in set(glue.values())]
    for combo in permutations(candidates, len(free)):
        mapping = dict(glue)
        mapping.update(zip(free, combo))
        if _oracle_constraints_ok(nac, host, mapping):
            return True
    return False


def is_self_nac(nac: Pattern) -> bool:
    return any(n.type == FAULT_TYPE for n in nac.nodes)


def simulate_catalog(rules: list[Rule], host: ModelGraph) -> set[tuple[str, int]]:
    """Expected (faultCode, anchor host id) set for additive detection rules.

    Valid because catalog rules only add Fault structure and no rule's LHS or
    non-self NAC mentions fault nodes, so every applicability question can be
    answered on the base graph and self-NACs reduce to dedup by (code, anchor).
    """
    found: set[tuple[str, int]] = set()
    for rule in rules:
        anchor_pid = next(e.dst for e in rule.rhs_edges if e.label == "at")
        for mapping_set in brute_force_matches(rule.lhs, host):
            mapping = dict(mapping_set)
            blocked = any(
                brute_force_nac_blocked(nac, host, mapping)
                for nac in rule.nacs if not is_self_nac(nac)
            )
            if not blocked:
                found.add((rule.fault_code, mapping[anchor_pid]))
    return found


def graphs_isomorphic(g1: ModelGraph, g2: ModelGraph,
                      ignore_lines: bool = True) -> bool:
    """Exact isomorphism on (type, attrs) nodes and labelled edges."""
    def sig(node):
        items = tuple(sorted(node.attrs.items()))
        return (node.type, items) if ignore_lines else (node.type, items, node.line)

    n1 = list(g1.nodes)
    n2 = list(g2.nodes)
    if len(n1) != len(n2) or len(g1.edges) != len(g2.edges):
        return False
    if sorted(sig(n) for n in n1) != sorted(sig(n) for n in n2):
        return False
    edges1 = sorted((e.label, e.src, e.dst) for e in g1.edges)

    def backtrack(idx: int, mapping: dict[int, int], used: set[int]) -> bool:
        if idx == len(n1):
            mapped = sorted((label, mapping[s], mapping[d]) for label, s, d in edges1)
            target = sorted((e.label, e.src, e.dst) for e in g2.edges)
            return mapped == target
        node = n1[idx]
        for cand in n2:
            if cand.id in used or sig(cand) != sig(node):
                continue
            mapping[node.id] = cand.id
            used.add(cand.id)
            if backtrack(idx + 1, mapping, used):
                return True
            used.discard(cand.id)
            del mapping[node.id]
        return False

    return backtrack(0, {}, set())
