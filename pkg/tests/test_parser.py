"""Tokenizer and recursive-descent parser over the supported subset."""

from __future__ import annotations

import pytest

from drlint import parser as P
from drlint.parser import SourceSyntaxError, SourceUnit, parse_text

from conftest import clean_source


def stmts(text: str):
    return parse_text(text).body


def test_smallest_program():
    body = stmts("x = 1\n")
    assert len(body) == 1
    assign = body[0]
    assert isinstance(assign, P.Assign)
    assert isinstance(assign.targets[0], P.Name) and assign.targets[0].id == "x"
    assert isinstance(assign.value, P.Num) and assign.value.value == 1
    assert assign.line == 1


def test_malformed_def_raises_with_location():
    with pytest.raises(SourceSyntaxError) as err:
        parse_text("def f(:\n    pass\n")
    assert err.value.line == 1


def test_clean_fixture_construct_counts():
    # Independent manual counts from reading the fixture: one gym.make call,
    # two Sequential network constructions, one top-level training loop.
    module = P.parse(clean_source())
    makes = [n for n in P.walk(module)
             if isinstance(n, P.Call)
             and isinstance(n.func, P.Attribute) and n.func.attr == "make"
             and isinstance(n.func.value, P.Name) and n.func.value.id == "gym"]
    seqs = [n for n in P.walk(module)
            if isinstance(n, P.Call)
            and isinstance(n.func, P.Attribute) and n.func.attr == "Sequential"]
    top_loops = [s for s in module.body if isinstance(s, (P.For, P.While))]
    assert len(makes) == 1
    assert len(seqs) == 2
    assert len(top_loops) == 1


def test_tuple_unpack_assignment():
    body = stmts("a, b, c, d = env.step(action)\n")
    assign = body[0]
    target = assign.targets[0]
    assert isinstance(target, P.TupleExpr)
    assert [e.id for e in target.elts] == ["a", "b", "c", "d"]


def test_for_loop_with_tuple_target():
    body = stmts("for s, a, r in batch:\n    pass\n")
    loop = body[0]
    assert isinstance(loop, P.For)
    assert isinstance(loop.target, P.TupleExpr)
    assert [e.id for e in loop.target.elts] == ["s", "a", "r"]
    assert isinstance(loop.iter, P.Name) and loop.iter.id == "batch"


def test_elif_chain_and_inline_suite():
    body = stmts("if a:\n    x = 1\nelif b:\n    x = 2\nelse:\n    x = 3\nif d: break\n")
    first = body[0]
    assert isinstance(first, P.If)
    assert isinstance(first.orelse[0], P.If)
    assert isinstance(first.orelse[0].orelse[0], P.Assign)
    inline = body[1]
    assert isinstance(inline.body[0], P.Break)


def test_call_with_keyword_arguments_and_nesting():
    body = stmts('m.add(tf.keras.layers.Dense(24, input_dim=state, activation="relu"))\n')
    call = body[0].value
    inner = call.args[0]
    assert isinstance(inner, P.Call)
    assert inner.args[0].value == 24
    assert {k.name for k in inner.kwargs} == {"input_dim", "activation"}


def test_multiline_call_inside_brackets():
    body = stmts("x = f(1,\n      2,\n      three=3)\n")
    call = body[0].value
    assert len(call.args) == 2 and call.kwargs[0].name == "three"


def test_comparison_and_arithmetic_precedence():
    expr = stmts("ok = r + g * q < 10\n")[0].value
    assert isinstance(expr, P.Compare) and expr.op == "<"
    plus = expr.left
    assert isinstance(plus, P.BinOp) and plus.op == "+"
    assert isinstance(plus.right, P.BinOp) and plus.right.op == "*"


def test_augmented_assignment():
    aug = stmts("eps *= 0.995\n")[0]
    assert isinstance(aug, P.AugAssign) and aug.op == "*"
    assert aug.value.value == 0.995


def test_unsupported_constructs_become_opaque_statements():
    text = (
        "xs = [i for i in range(3)]\n"
        "d = {\"a\": 1}\n"
        "class Agent:\n"
        "    def act(self):\n"
        "        return 1\n"
        "with session() as s:\n"
        "    s.run()\n"
        "y = 2\n"
    )
    body = stmts(text)
    kinds = [type(s).__name__ for s in body]
    assert kinds == ["Opaque", "Opaque", "Opaque", "Opaque", "Assign"]
    assert body[-1].value.value == 2


def test_decorator_line_is_opaque_but_def_parses():
    body = stmts("@wrap\ndef f():\n    return 1\n")
    assert isinstance(body[0], P.Opaque)
    assert isinstance(body[1], P.FunctionDef)
    assert body[1].name == "f"


def test_lines_survive_comments_and_blanks():
    text = "# header\n\nx = 1\n\n# more\ny = 2\n"
    body = stmts(text)
    assert [s.line for s in body] == [3, 6]


def test_strings_and_docstrings():
    body = stmts('"""doc"""\nname = "q-net"\n')
    assert isinstance(body[0], P.ExprStmt) and body[0].value.value == "doc"
    assert body[1].value.value == "q-net"


def test_fstring_statement_is_opaque():
    body = stmts('x = f"val {v}"\n')
    assert isinstance(body[0], P.Opaque)


def test_unterminated_string_raises():
    with pytest.raises(SourceSyntaxError):
        parse_text('x = "abc\n')


def test_inconsistent_dedent_raises():
    with pytest.raises(SourceSyntaxError):
        parse_text("if a:\n        x = 1\n    y = 2\n")


def test_numbers_with_underscores_and_exponents():
    vals = [s.value.value for s in stmts("a = 100_000\nb = 1e-3\nc = 0.5\n")]
    assert vals == [100000, 0.001, 0.5]


def test_not_and_boolean_operators():
    test = stmts("while not done and t < 200:\n    pass\n")[0].test
    assert isinstance(test, P.BoolOp) and test.op == "and"
    assert isinstance(test.values[0], P.UnaryOp) and test.values[0].op == "not"


def test_whitespace_insensitivity_of_structure():
    a = stmts("x = 1\ny = x + 2\n")
    b = stmts("# lead\n\nx = 1\n\n\ny = x + 2  # trail\n")
    def shape(body):
        return [(type(s).__name__, type(getattr(s, "value", None)).__name__) for s in body]
    assert shape(a) == shape(b)


def test_source_unit_line_offsets():
    unit = SourceUnit("p.py", "a\nbc\n")
    assert unit.line_offsets() == [0, 2, 5]
