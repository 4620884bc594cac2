"""Model extraction: recognized Gym/TensorFlow API patterns become graph elements.

The mapping is deliberately shallow and auditable (docs/mapping.md lists every
recognized pattern). Name-to-literal resolution is one step: a name assigned
exactly once at module scope to a numeric literal resolves to that literal;
anything else leaves the attribute absent, which detection rules treat as
"not found in the code" rather than a value.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import parser as P
from .graph import Edge, ModelGraph, Node, PROGRAM_TYPE
from .parser import SourceUnit

RAND_UNIFORM_SUFFIXES = {"rand", "random", "uniform", "random_sample"}
RAND_INT_SUFFIXES = {"randint", "randrange"}
RAND_ROOTS = {"random", "np", "numpy", "tf"}
MAX_SUFFIXES = {"max", "amax", "reduce_max"}
PREDICT_ATTRS = {"predict", "predict_on_batch"}
FIT_ATTRS = {"fit", "train_on_batch"}
DENSE_SUFFIX = "dense"
SEQUENTIAL_SUFFIX = "sequential"

HYPERPARAM_NAMES = {
    "batch_size": "batchSize",
    "batchsize": "batchSize",
    "epochs": "epochs",
    "num_epochs": "epochs",
    "numepochs": "epochs",
    "buffer_size": "replayBufferSize",
    "buffersize": "replayBufferSize",
    "memory_size": "replayBufferSize",
    "memorysize": "replayBufferSize",
}


# ---------------------------------------------------------------------------
# Expression helpers
# ---------------------------------------------------------------------------


def dotted_name(expr) -> list[str] | None:
    """['tf', 'layers', 'dense'] for tf.layers.dense; None for other shapes."""
    parts: list[str] = []
    cur = expr
    while isinstance(cur, P.Attribute):
        parts.append(cur.attr)
        cur = cur.value
    if isinstance(cur, P.Name):
        parts.append(cur.id)
        return list(reversed(parts))
    return None


def calls_in(expr) -> list[P.Call]:
    return [n for n in P.walk(expr) if isinstance(n, P.Call)]


def names_in(expr) -> set[str]:
    return {n.id for n in P.walk(expr) if isinstance(n, P.Name)}


def is_env_method_call(call: P.Call, env_names: set[str], method: str) -> str | None:
    """The environment binding name when ``call`` is ``<env>.<method>(...)``."""
    f = call.func
    if isinstance(f, P.Attribute) and f.attr == method and isinstance(f.value, P.Name):
        if f.value.id in env_names:
            return f.value.id
    return None


def is_action_space_n(expr, env_names: set[str]) -> str | None:
    if isinstance(expr, P.Attribute) and expr.attr == "n":
        base = expr.value
        if isinstance(base, P.Attribute) and base.attr == "action_space" and \
                isinstance(base.value, P.Name) and base.value.id in env_names:
            return base.value.id
    return None


def is_obs_shape_zero(expr, env_names: set[str]) -> str | None:
    if isinstance(expr, P.Subscript) and isinstance(expr.index, P.Num) and \
            expr.index.value == 0:
        base = expr.value
        if isinstance(base, P.Attribute) and base.attr == "shape":
            inner = base.value
            if isinstance(inner, P.Attribute) and inner.attr == "observation_space" and \
                    isinstance(inner.value, P.Name) and inner.value.id in env_names:
                return inner.value.id
    return None


def _call_suffix_root(call: P.Call) -> tuple[str, str] | None:
    parts = dotted_name(call.func)
    if not parts:
        return None
    return parts[0], parts[-1]


def is_rand_uniform_call(call: P.Call) -> bool:
    sr = _call_suffix_root(call)
    return sr is not None and sr[0] in RAND_ROOTS and sr[1] in RAND_UNIFORM_SUFFIXES


def is_rand_int_call(call: P.Call) -> bool:
    sr = _call_suffix_root(call)
    return sr is not None and sr[0] in RAND_ROOTS and sr[1] in RAND_INT_SUFFIXES


def is_max_call(call: P.Call) -> bool:
    if isinstance(call.func, P.Name):
        return call.func.id == "max"
    parts = dotted_name(call.func)
    return bool(parts) and parts[-1] in MAX_SUFFIXES


def activation_value(expr) -> str | None:
    """Activation kwarg value: a string literal or the tail of a dotted name."""
    if isinstance(expr, P.Str):
        return expr.value.lower()
    if isinstance(expr, P.NoneLit):
        return "linear"
    parts = dotted_name(expr)
    if parts:
        return parts[-1].lower()
    return None


# ---------------------------------------------------------------------------
# Walk records
# ---------------------------------------------------------------------------


@dataclass
class _StepRec:
    env: str
    line: int
    done_name: str | None
    loops: tuple[int, ...]


@dataclass
class _CondRec:
    line: int
    test: object
    loops: tuple[int, ...]  # for while tests this includes the loop itself


@dataclass
class _CopyRec:
    dst: str
    src: str
    line: int
    guards: tuple  # enclosing if tests, innermost last


@dataclass
class _StackRec:
    key: str
    kind: str  # "sequential" | "chain"
    create_line: int
    layers: list[tuple[object, str | None, int]] = dc_field(default_factory=list)
    out_name: str | None = None  # chain: current final output binding
    role: str = "q"  # assigned during assembly: "q" | "target"
    node_id: int = 0

    def final_layer(self) -> tuple[object, str | None, int] | None:
        return self.layers[-1] if self.layers else None


@dataclass
class _Collected:
    env_assigns: list[tuple[str, int]] = dc_field(default_factory=list)
    resets: list[tuple[str, int]] = dc_field(default_factory=list)
    closes: list[tuple[str, int]] = dc_field(default_factory=list)
    steps: list[_StepRec] = dc_field(default_factory=list)
    conds: list[_CondRec] = dc_field(default_factory=list)
    stacks: list[_StackRec] = dc_field(default_factory=list)
    copies: list[_CopyRec] = dc_field(default_factory=list)
    predict_outputs: dict[str, str] = dc_field(default_factory=dict)  # var -> stack key
    fit_receivers: list[str] = dc_field(default_factory=list)
    update_candidates: list[tuple[int, object]] = dc_field(default_factory=list)
    expl_ifs: list[P.If] = dc_field(default_factory=list)
    aug_assigns: list[tuple[str, str, object, tuple]] = dc_field(default_factory=list)
    plain_assigns: list[tuple[object, object, bool, tuple]] = dc_field(default_factory=list)
    compares: list[P.Compare] = dc_field(default_factory=list)
    top_level_bind_counts: dict[str, int] = dc_field(default_factory=dict)
    top_level_literals: dict[str, int | float] = dc_field(default_factory=dict)
    aliases_actions: dict[str, str] = dc_field(default_factory=dict)  # alias -> env name
    aliases_states: dict[str, str] = dc_field(default_factory=dict)

    def literal(self, name: str) -> int | float | None:
        if self.top_level_bind_counts.get(name) == 1:
            return self.top_level_literals.get(name)
        return None

    def value_of(self, expr) -> int | float | None:
        if isinstance(expr, P.Num):
            return expr.value
        if isinstance(expr, P.UnaryOp) and expr.op == "-" and isinstance(expr.operand, P.Num):
            return -expr.operand.value
        if isinstance(expr, P.Name):
            return self.literal(expr.id)
        return None


class _Walker:
    def __init__(self) -> None:
        self.c = _Collected()
        self.env_names: set[str] = set()
        self.eps_sites: list[tuple[str, int]] = []
        self._seq_by_var: dict[str, _StackRec] = {}
        self._chain_by_out: dict[str, _StackRec] = {}
        self._loop_counter = 0

    # -- statement dispatch --------------------------------------------------

    def walk_module(self, module: P.Module) -> _Collected:
        for stmt in module.body:
            self.visit(stmt, loops=(), guards=(), top=True)
        return self.c

    def visit(self, stmt, loops: tuple, guards: tuple, top: bool) -> None:
        if isinstance(stmt, P.Assign):
            self.on_assign(stmt, loops, guards, top)
        elif isinstance(stmt, P.AugAssign):
            if isinstance(stmt.target, P.Name):
                self.c.aug_assigns.append((stmt.target.id, stmt.op, stmt.value, guards))
            if top and isinstance(stmt.target, P.Name):
                self._count_binding(stmt.target.id, literal=None)
            self.scan_exprs(stmt.value, guards)
        elif isinstance(stmt, P.ExprStmt):
            self.on_expr_stmt(stmt, guards)
        elif isinstance(stmt, P.If):
            self.c.conds.append(_CondRec(stmt.line, stmt.test, loops))
            self.maybe_exploration(stmt)
            self.scan_exprs(stmt.test, guards)
            for s in stmt.body:
                self.visit(s, loops, guards + (stmt.test,), top=False)
            for s in stmt.orelse:
                self.visit(s, loops, guards, top=False)
        elif isinstance(stmt, P.While):
            self._loop_counter += 1
            lid = self._loop_counter
            self.c.conds.append(_CondRec(stmt.line, stmt.test, loops + (lid,)))
            self.scan_exprs(stmt.test, guards)
            for s in stmt.body:
                self.visit(s, loops + (lid,), guards, top=False)
        elif isinstance(stmt, P.For):
            self._loop_counter += 1
            lid = self._loop_counter
            self.scan_exprs(stmt.iter, guards)
            for s in stmt.body:
                self.visit(s, loops + (lid,), guards, top=False)
        elif isinstance(stmt, P.FunctionDef):
            for s in stmt.body:
                self.visit(s, loops, guards, top=False)
        elif isinstance(stmt, P.Return) and stmt.value is not None:
            self.scan_exprs(stmt.value, guards)
        # Import, Break, Continue, Pass, Opaque: nothing to record.

    # -- assignments ----------------------------------------------------------

    def on_assign(self, stmt: P.Assign, loops: tuple, guards: tuple, top: bool) -> None:
        value = stmt.value
        target = stmt.targets[0] if len(stmt.targets) == 1 else None
        self.c.plain_assigns.append((stmt.targets, value, top, guards))

        if top and isinstance(target, P.Name):
            lit = None
            if isinstance(value, P.Num):
                lit = value.value
            elif isinstance(value, P.UnaryOp) and value.op == "-" and \
                    isinstance(value.operand, P.Num):
                lit = -value.operand.value
            self._count_binding(target.id, lit)

        if isinstance(target, P.Name) and isinstance(value, P.Call):
            parts = dotted_name(value.func)
            if parts == ["gym", "make"]:
                self.env_names.add(target.id)
                self.c.env_assigns.append((target.id, stmt.line))
                self.scan_exprs(value, guards)
                return
            if parts and parts[-1].lower() == SEQUENTIAL_SUFFIX:
                rec = _StackRec(target.id, "sequential", stmt.line)
                self._seq_by_var[target.id] = rec
                self.c.stacks.append(rec)
                self.scan_exprs(value, guards)
                return
            if parts and parts[-1].lower() == DENSE_SUFFIX and value.args:
                self.on_dense_chain(target.id, value, stmt.line)
                self.scan_exprs(value, guards)
                return

        # Tuple-unpacked env.step: the third target is the done flag.
        if isinstance(target, P.TupleExpr) and isinstance(value, P.Call):
            env = is_env_method_call(value, self.env_names, "step")
            if env is not None:
                done = None
                if len(target.elts) >= 3 and isinstance(target.elts[2], P.Name):
                    done = target.elts[2].id
                self.c.steps.append(_StepRec(env, stmt.line, done, loops))
                self.scan_exprs(value, guards)
                return

        if isinstance(target, P.Name):
            self.note_aliases(target.id, value)
            for call in calls_in(value):
                f = call.func
                if isinstance(f, P.Attribute) and f.attr in PREDICT_ATTRS and \
                        isinstance(f.value, P.Name):
                    self.c.predict_outputs.setdefault(target.id, f.value.id)
                    break

        if isinstance(value, P.BinOp) and value.op == "+":
            self.c.update_candidates.append((stmt.line, value))

        self.scan_exprs(value, guards)

    def _count_binding(self, name: str, literal: int | float | None) -> None:
        self.c.top_level_bind_counts[name] = self.c.top_level_bind_counts.get(name, 0) + 1
        if literal is not None and name not in self.c.top_level_literals:
            self.c.top_level_literals[name] = literal

    def note_aliases(self, name: str, value) -> None:
        env = is_action_space_n(value, self.env_names)
        if env is not None:
            self.c.aliases_actions.setdefault(name, env)
        env = is_obs_shape_zero(value, self.env_names)
        if env is not None:
            self.c.aliases_states.setdefault(name, env)

    def on_dense_chain(self, out: str, call: P.Call, line: int) -> None:
        if len(call.args) < 2 or not isinstance(call.args[0], P.Name):
            return
        inp = call.args[0].id
        units = call.args[1]
        activation = self._activation_kwarg(call)
        rec = self._chain_by_out.get(inp)
        if rec is None:
            rec = _StackRec(out, "chain", line)
            self.c.stacks.append(rec)
        else:
            del self._chain_by_out[inp]
        rec.layers.append((units, activation, line))
        rec.out_name = out
        self._chain_by_out[out] = rec

    @staticmethod
    def _activation_kwarg(call: P.Call) -> str | None:
        for kw in call.kwargs:
            if kw.name == "activation":
                return activation_value(kw.value)
        return None

    # -- expression statements ------------------------------------------------

    def on_expr_stmt(self, stmt: P.ExprStmt, guards: tuple) -> None:
        value = stmt.value
        if isinstance(value, P.Call):
            f = value.func
            if isinstance(f, P.Attribute) and isinstance(f.value, P.Name) and \
                    f.attr == "add" and f.value.id in self._seq_by_var and value.args:
                layer = value.args[0]
                if isinstance(layer, P.Call):
                    parts = dotted_name(layer.func)
                    if parts and parts[-1].lower() == "dense" and layer.args:
                        rec = self._seq_by_var[f.value.id]
                        rec.layers.append((layer.args[0],
                                           self._activation_kwarg(layer), stmt.line))
        self.scan_exprs(value, guards)

    # -- generic expression scan ------------------------------------------------

    def scan_exprs(self, expr, guards: tuple = ()) -> None:
        for node in P.walk(expr):
            if isinstance(node, P.Compare):
                self.c.compares.append(node)
            if not isinstance(node, P.Call):
                continue
            for method, sink in (("reset", self.c.resets), ("close", self.c.closes)):
                env = is_env_method_call(node, self.env_names, method)
                if env is not None:
                    sink.append((env, node.line))
            f = node.func
            if isinstance(f, P.Attribute) and isinstance(f.value, P.Name):
                if f.attr in FIT_ATTRS:
                    self.c.fit_receivers.append(f.value.id)
                if f.attr == "set_weights" and node.args:
                    arg = node.args[0]
                    if isinstance(arg, P.Call) and isinstance(arg.func, P.Attribute) \
                            and arg.func.attr == "get_weights" \
                            and isinstance(arg.func.value, P.Name):
                        self.c.copies.append(_CopyRec(
                            f.value.id, arg.func.value.id, node.line, guards))

    # -- epsilon-greedy recognition --------------------------------------------

    def maybe_exploration(self, stmt: P.If) -> None:
        shape = self._eps_test_shape(stmt.test)
        if shape is None or not stmt.orelse:
            return
        eps_name = shape
        if not self._branch_selects_random(stmt.body):
            return
        if not self._branch_selects_network(stmt.orelse):
            return
        self.c.expl_ifs.append(stmt)
        self.eps_sites.append((eps_name, stmt.line))

    def _eps_test_shape(self, test) -> str | None:
        if not isinstance(test, P.Compare):
            return None
        left, op, right = test.left, test.op, test.right
        if op in ("<", "<=") and isinstance(left, P.Call) and is_rand_uniform_call(left) \
                and isinstance(right, P.Name):
            return right.id
        if op in (">", ">=") and isinstance(right, P.Call) and is_rand_uniform_call(right) \
                and isinstance(left, P.Name):
            return left.id
        return None

    def _branch_selects_random(self, body) -> bool:
        for s in body:
            if isinstance(s, P.Assign):
                for call in calls_in(s.value):
                    if is_rand_int_call(call):
                        return True
                    f = call.func
                    if isinstance(f, P.Attribute) and f.attr == "sample":
                        base = f.value
                        if isinstance(base, P.Attribute) and base.attr == "action_space" \
                                and isinstance(base.value, P.Name) \
                                and base.value.id in self.env_names:
                            return True
        return False

    def _branch_selects_network(self, body) -> bool:
        for s in body:
            if not isinstance(s, P.Assign):
                continue
            for node in P.walk(s.value):
                if isinstance(node, P.Call):
                    parts = dotted_name(node.func)
                    if parts and parts[-1] == "argmax":
                        return True
                    f = node.func
                    if isinstance(f, P.Attribute) and f.attr in PREDICT_ATTRS:
                        return True
                if isinstance(node, P.Subscript):
                    base_names = names_in(node.value)
                    if base_names & set(self.c.predict_outputs):
                        return True
        return False


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


class _Builder:
    def __init__(self) -> None:
        self.nodes: list[Node] = []
        self.edges: list[Edge] = []
        self._nid = 0
        self._eid = 0

    def node(self, node_type: str, attrs: dict | None = None,
             line: int | None = None) -> int:
        self._nid += 1
        self.nodes.append(Node(self._nid, node_type, dict(attrs or {}), line))
        return self._nid

    def edge(self, label: str, src: int, dst: int) -> None:
        self._eid += 1
        self.edges.append(Edge(self._eid, label, src, dst))

    def build(self) -> ModelGraph:
        return ModelGraph(self.nodes, self.edges)


def _network_provider(c: _Collected, expr,
                      seq_keys: dict[str, _StackRec],
                      chain_outs: dict[str, _StackRec]) -> tuple[bool, _StackRec | None]:
    """(is network rooted, providing stack if identifiable)."""
    provider: _StackRec | None = None
    rooted = False
    for node in P.walk(expr):
        if isinstance(node, P.Call):
            f = node.func
            if isinstance(f, P.Attribute) and isinstance(f.value, P.Name):
                if f.attr in PREDICT_ATTRS:
                    rooted = True
                    provider = provider or seq_keys.get(f.value.id)
                if f.attr == "run":
                    for arg in node.args:
                        if isinstance(arg, P.Name) and arg.id in chain_outs:
                            rooted = True
                            provider = provider or chain_outs[arg.id]
        if isinstance(node, P.Name):
            if node.id in c.predict_outputs:
                rooted = True
                provider = provider or seq_keys.get(c.predict_outputs[node.id])
            if node.id in chain_outs:
                rooted = True
                provider = provider or chain_outs[node.id]
    return rooted, provider


def _match_update_shape(c: _Collected, plus: P.BinOp,
                        seq_keys: dict[str, _StackRec],
                        chain_outs: dict[str, _StackRec]):
    """r + g * X (any product order): (gamma value or None, has_max, provider)."""
    for product, _other in ((plus.right, plus.left), (plus.left, plus.right)):
        if not (isinstance(product, P.BinOp) and product.op == "*"):
            continue
        for g_side, x_side in ((product.left, product.right),
                               (product.right, product.left)):
            if not isinstance(g_side, (P.Num, P.Name)):
                continue
            has_max = any(is_max_call(call) for call in calls_in(x_side))
            rooted, provider = _network_provider(c, x_side, seq_keys, chain_outs)
            if not rooted:
                continue
            gamma = c.value_of(g_side)
            return gamma, has_max, provider
    return None


def extract_model(source: SourceUnit) -> ModelGraph:
    """Build the program's model graph; one DRLProgram root, anchored nodes."""
    module = P.parse(source)
    return model_from_tree(module)


def model_from_tree(module: P.Module) -> ModelGraph:
    walker = _Walker()
    c = walker.walk_module(module)

    b = _Builder()
    prog = b.node(PROGRAM_TYPE, line=1)

    env_nodes: dict[str, int] = {}
    init_nodes: dict[str, int] = {}
    for env_name, line in c.env_assigns:
        if env_name in env_nodes:
            continue  # one Environment per binding; re-make keeps the first
        env = b.node("Environment", line=line)
        init = b.node("Initialize", line=line)
        env_nodes[env_name] = env
        init_nodes[env_name] = init
        b.edge("hasEnv", prog, env)
        b.edge("initializedBy", env, init)

    # numActions / numStates from literal comparisons against action_space.n
    # (or a once-bound alias of it).
    env_attrs: dict[str, dict] = {name: {} for name in env_nodes}
    for cmp_ in c.compares:
        if cmp_.op != "==":
            continue
        for lhs, rhs in ((cmp_.left, cmp_.right), (cmp_.right, cmp_.left)):
            if not (isinstance(rhs, P.Num) and isinstance(rhs.value, int)):
                continue
            env = is_action_space_n(lhs, walker.env_names)
            if env is None and isinstance(lhs, P.Name):
                env = c.aliases_actions.get(lhs.id)
            if env in env_attrs:
                env_attrs[env].setdefault("numActions", rhs.value)
                continue
            env = is_obs_shape_zero(lhs, walker.env_names)
            if env is None and isinstance(lhs, P.Name):
                env = c.aliases_states.get(lhs.id)
            if env in env_attrs:
                env_attrs[env].setdefault("numStates", rhs.value)

    step_nodes: list[tuple[_StepRec, int]] = []
    first_step_per_env: set[str] = set()
    for rec in c.steps:
        sid = b.node("Step", line=rec.line)
        step_nodes.append((rec, sid))
        if rec.env in init_nodes and rec.env not in first_step_per_env:
            b.edge("followedBy", init_nodes[rec.env], sid)
            first_step_per_env.add(rec.env)
    # Consecutive steps in the same innermost loop body chain with `next`.
    by_loop: dict = {}
    for rec, sid in step_nodes:
        key = rec.loops[-1] if rec.loops else None
        by_loop.setdefault(key, []).append(sid)
    for sids in by_loop.values():
        for a, z in zip(sids, sids[1:]):
            b.edge("next", a, z)

    done_names = {rec.done_name for rec, _ in step_nodes if rec.done_name}
    for cond in c.conds:
        used = names_in(cond.test) & done_names
        if not used:
            continue
        candidates = [(rec, sid) for rec, sid in step_nodes if rec.done_name in used]
        if not candidates:
            continue
        inner = cond.loops[-1] if cond.loops else None
        chosen = next(((rec, sid) for rec, sid in candidates
                       if inner is not None and inner in rec.loops), candidates[0])
        tc = b.node("TerminalCheck", line=cond.line)
        b.edge("checkedBy", chosen[1], tc)

    for env_name, line in c.resets:
        if env_name in env_nodes:
            node = b.node("Reset", line=line)
            b.edge("resetBy", env_nodes[env_name], node)
    for env_name, line in c.closes:
        if env_name in env_nodes:
            node = b.node("Close", line=line)
            b.edge("closedBy", env_nodes[env_name], node)

    # -- agent side -----------------------------------------------------------

    stacks = [s for s in c.stacks if s.layers]
    seq_keys = {s.key: s for s in stacks if s.kind == "sequential"}
    chain_outs = {s.out_name: s for s in stacks if s.kind == "chain" and s.out_name}

    update = None
    for line, plus in c.update_candidates:
        shape = _match_update_shape(c, plus, seq_keys, chain_outs)
        if shape is not None:
            update = (line, *shape)
            break

    fitted = [name for name in c.fit_receivers if name in seq_keys]
    main_stack: _StackRec | None = None
    if fitted:
        main_stack = seq_keys[fitted[0]]
    elif stacks:
        main_stack = stacks[0]

    for copy in c.copies:
        if copy.dst in seq_keys and copy.src in seq_keys and copy.dst != copy.src:
            seq_keys[copy.dst].role = "target"
    if update is not None:
        provider = update[3]
        if provider is not None and provider is not main_stack:
            provider.role = "target"
    if main_stack is not None and main_stack.role == "target":
        main_stack = next((s for s in stacks if s.role != "target"), None)

    dqn = None
    if stacks:
        dqn = b.node("DQN", line=stacks[0].create_line)
        b.edge("hasAgent", prog, dqn)

    sync_freq: dict[str, int] = {}
    for copy in c.copies:
        if copy.dst not in seq_keys or seq_keys[copy.dst].role != "target":
            continue
        for test in copy.guards:
            freq = _modulo_guard_literal(c, test)
            if freq is not None:
                sync_freq.setdefault(copy.dst, freq)
                break

    q_nodes: dict[str, int] = {}
    t_nodes: dict[str, int] = {}
    for s in stacks:
        final = s.final_layer()
        if s.role == "target":
            attrs = {}
            if s.key in sync_freq:
                attrs["syncFrequency"] = sync_freq[s.key]
            s.node_id = b.node("TargetNetwork", attrs, line=final[2] if final else s.create_line)
            t_nodes[s.key] = s.node_id
        else:
            attrs = {}
            if final is not None:
                units = c.value_of(final[0])
                if isinstance(units, int) and not isinstance(units, bool):
                    attrs["outputDim"] = units
                attrs["outputActivation"] = final[1] if final[1] else "linear"
            s.node_id = b.node("QNetwork", attrs, line=final[2] if final else s.create_line)
            q_nodes[s.key] = s.node_id
        b.edge("owns", dqn, s.node_id)  # type: ignore[arg-type]

    main_q = main_stack.node_id if main_stack is not None and main_stack.role != "target" else None

    synced: set[tuple[str, str]] = set()
    for copy in c.copies:
        pair = (copy.src, copy.dst)
        if pair in synced:
            continue
        if copy.src in q_nodes and copy.dst in t_nodes:
            b.edge("syncsTo", q_nodes[copy.src], t_nodes[copy.dst])
            synced.add(pair)
    if main_q is not None:
        for s in stacks:
            if s.role == "target":
                b.edge("providesTargets", s.node_id, main_q)

    if c.expl_ifs and dqn is not None:
        eps_name, line = walker.eps_sites[0]
        attrs = {}
        value = c.literal(eps_name)
        if value is not None:
            attrs["epsilon"] = float(value)
        final_eps, decay = _exploration_schedule(c, eps_name)
        if final_eps is not None:
            attrs["epsilonFinal"] = float(final_eps)
        if decay is not None:
            attrs["decay"] = float(decay)
        expl = b.node("Exploration", attrs, line=line)
        b.edge("explores", dqn, expl)

    if update is not None:
        line, gamma, has_max, _provider = update
        attrs = {"hasMaxTerm": has_max}
        if gamma is not None:
            attrs["gamma"] = float(gamma)
        upd = b.node("UpdateRule", attrs, line=line)
        if main_q is not None:
            b.edge("trainedBy", main_q, upd)

    if dqn is not None:
        hp_attrs: dict[str, int] = {}
        hp_line: int | None = None
        for name in c.top_level_bind_counts:
            canonical = HYPERPARAM_NAMES.get(name.lower())
            if canonical is None:
                continue
            value = c.literal(name)
            if isinstance(value, int) and not isinstance(value, bool):
                hp_attrs.setdefault(canonical, value)
        for targets, _value, top, _guards in c.plain_assigns:
            if top and len(targets) == 1 and isinstance(targets[0], P.Name) and \
                    targets[0].id.lower() in HYPERPARAM_NAMES and \
                    c.literal(targets[0].id) is not None:
                hp_line = targets[0].line if hp_line is None else min(hp_line, targets[0].line)
        if hp_attrs:
            hp = b.node("Hyperparameters", hp_attrs, line=hp_line)
            b.edge("configuredBy", dqn, hp)

    # Environment attributes resolved last but set on nodes created earlier:
    # rebuild those nodes with attrs in place.
    if any(env_attrs.values()):
        rebuilt = []
        for node in b.nodes:
            owner = next((name for name, nid in env_nodes.items() if nid == node.id), None)
            if owner and env_attrs.get(owner):
                rebuilt.append(Node(node.id, node.type, dict(env_attrs[owner]), node.line))
            else:
                rebuilt.append(node)
        b.nodes = rebuilt

    return b.build()


def _modulo_guard_literal(c: _Collected, test) -> int | None:
    """C for guards shaped ``<counter> % C == 0`` (either comparison order)."""
    if not isinstance(test, P.Compare) or test.op != "==":
        return None
    for mod_side, zero_side in ((test.left, test.right), (test.right, test.left)):
        if isinstance(zero_side, P.Num) and zero_side.value == 0 and \
                isinstance(mod_side, P.BinOp) and mod_side.op == "%":
            value = c.value_of(mod_side.right)
            if isinstance(value, int) and not isinstance(value, bool):
                return value
    return None


def _exploration_schedule(c: _Collected, eps_name: str):
    """(epsilonFinal, decay) gleaned from decay statements for the eps binding."""
    final_eps = None
    decay = None
    for target, op, value, guards in c.aug_assigns:
        if target != eps_name or op not in ("*", "-"):
            continue
        if decay is None:
            decay = c.value_of(value)
        for test in guards:
            bound = _eps_guard_limit(c, test, eps_name)
            if bound is not None and final_eps is None:
                final_eps = bound
    for targets, value, _top, _guards in c.plain_assigns:
        if len(targets) != 1 or not isinstance(targets[0], P.Name) or \
                targets[0].id != eps_name:
            continue
        # eps = max(floor, eps * c): the floor is the final rate, c the decay.
        if isinstance(value, P.Call) and isinstance(value.func, P.Name) and \
                value.func.id == "max" and len(value.args) == 2:
            for floor_side, prod_side in ((value.args[0], value.args[1]),
                                          (value.args[1], value.args[0])):
                if isinstance(prod_side, P.BinOp) and prod_side.op == "*" and \
                        eps_name in names_in(prod_side):
                    if final_eps is None:
                        final_eps = c.value_of(floor_side)
                    if decay is None:
                        for side in (prod_side.left, prod_side.right):
                            if not (isinstance(side, P.Name) and side.id == eps_name):
                                candidate = c.value_of(side)
                                if candidate is not None:
                                    decay = candidate
                    break
    return final_eps, decay


def _eps_guard_limit(c: _Collected, test, eps_name: str) -> int | float | None:
    if not isinstance(test, P.Compare):
        return None
    if test.op in (">", ">=") and isinstance(test.left, P.Name) and \
            test.left.id == eps_name:
        return c.value_of(test.right)
    if test.op in ("<", "<=") and isinstance(test.right, P.Name) and \
            test.right.id == eps_name:
        return c.value_of(test.left)
    return None
