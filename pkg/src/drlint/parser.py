"""Tokenizer and recursive-descent parser for flat training scripts.

The front end understands a deliberate subset of Python: module-level
statements, function definitions, for/while/if blocks, assignments, calls,
attribute and subscript access, tuples, literals, comparisons and arithmetic.
Anything outside the subset (class bodies, comprehensions, lambdas, dict/set
displays, f-strings, ...) is kept as an opaque statement the extractor skips;
a malformed *supported* construct raises SourceSyntaxError. The full grammar
is documented in docs/grammar.md and is the compatibility contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


class SourceSyntaxError(Exception):
    """Token-level malformation inside a supported construct."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class _Unsupported(Exception):
    """Internal: construct is outside the subset; statement becomes opaque."""


# ---------------------------------------------------------------------------
# Source units
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SourceUnit:
    path: str
    text: str

    @classmethod
    def from_path(cls, path: str | Path) -> "SourceUnit":
        return cls(str(path), Path(path).read_text(encoding="utf-8"))

    def line_offsets(self) -> list[int]:
        offsets = [0]
        for i, ch in enumerate(self.text):
            if ch == "\n":
                offsets.append(i + 1)
        return offsets


# ---------------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------------

KEYWORDS = {
    "def", "for", "while", "if", "elif", "else", "return", "break", "continue",
    "pass", "import", "from", "as", "in", "not", "and", "or", "True", "False",
    "None",
}

# Statement keywords we recognise but do not model; they turn opaque.
OPAQUE_KEYWORDS = {
    "class", "with", "try", "except", "finally", "raise", "del", "global",
    "nonlocal", "assert", "lambda", "yield", "async", "await", "match", "case",
}

_TWO_CHAR_OPS = {
    "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "//", "**", "%=",
}
_THREE_CHAR_OPS = {"//=", "**="}
_SINGLE_OPS = set("+-*/%<>=.,:()[]{};@")


@dataclass(frozen=True)
class Token:
    kind: str   # NAME KEYWORD NUMBER STRING OP NEWLINE INDENT DEDENT EOF
    value: str
    line: int
    column: int
    prefix: str = ""  # string literal prefix, lowercased


def tokenize(source: SourceUnit) -> list[Token]:
    text = source.text
    tokens: list[Token] = []
    indents = [0]
    i = 0
    line = 1
    col = 0
    depth = 0           # bracket nesting; newlines inside brackets are joined
    at_line_start = True
    n = len(text)

    def error(msg: str) -> SourceSyntaxError:
        return SourceSyntaxError(msg, line, col + 1)

    while i < n:
        if at_line_start and depth == 0:
            # Measure indentation; tabs advance to the next multiple of 8.
            width = 0
            j = i
            while j < n and text[j] in " \t":
                width = width + 1 if text[j] == " " else (width // 8 + 1) * 8
                j += 1
            if j >= n or text[j] in "\n#":
                # Blank or comment-only line: no tokens at all.
                while j < n and text[j] != "\n":
                    j += 1
                if j < n:
                    j += 1
                    line += 1
                i = j
                col = 0
                continue
            col = j - i
            if width > indents[-1]:
                indents.append(width)
                tokens.append(Token("INDENT", "", line, 1))
            else:
                while width < indents[-1]:
                    indents.pop()
                    tokens.append(Token("DEDENT", "", line, 1))
                if width != indents[-1]:
                    raise error("inconsistent indentation")
            i = j
            at_line_start = False
            continue

        ch = text[i]

        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue

        if ch == "\n":
            if depth == 0 and tokens and tokens[-1].kind not in ("NEWLINE", "INDENT", "DEDENT"):
                tokens.append(Token("NEWLINE", "\n", line, col + 1))
            i += 1
            line += 1
            col = 0
            at_line_start = depth == 0
            continue

        if ch in " \t":
            i += 1
            col += 1
            continue

        if ch == "\\" and i + 1 < n and text[i + 1] == "\n":
            i += 2
            line += 1
            col = 0
            continue

        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            start, start_col = i, col
            seen_dot = False
            seen_exp = False
            while i < n:
                c = text[i]
                if c.isdigit() or c == "_":
                    i += 1
                elif c == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    i += 1
                elif c in "eE" and not seen_exp and i + 1 < n and (
                        text[i + 1].isdigit() or text[i + 1] in "+-"):
                    seen_exp = True
                    i += 2 if text[i + 1] in "+-" else 1
                else:
                    break
            col += i - start
            tokens.append(Token("NUMBER", text[start:i].replace("_", ""), line, start_col + 1))
            continue

        if ch.isalpha() or ch == "_":
            start, start_col = i, col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            col += i - start
            if i < n and text[i] in "'\"" and word.lower() in (
                    "r", "b", "u", "f", "rb", "br", "fr", "rf"):
                tok, i, line, col = _string_token(text, i, line, col, word.lower())
                tokens.append(tok)
                continue
            kind = "KEYWORD" if word in KEYWORDS else "NAME"
            tokens.append(Token(kind, word, line, start_col + 1))
            continue

        if ch in "'\"":
            tok, i, line, col = _string_token(text, i, line, col, "")
            tokens.append(tok)
            continue

        three = text[i:i + 3]
        if three in _THREE_CHAR_OPS:
            tokens.append(Token("OP", three, line, col + 1))
            i += 3
            col += 3
            continue
        two = text[i:i + 2]
        if two in _TWO_CHAR_OPS:
            tokens.append(Token("OP", two, line, col + 1))
            i += 2
            col += 2
            continue
        if ch in _SINGLE_OPS:
            if ch in "([{":
                depth += 1
            elif ch in ")]}":
                depth = max(0, depth - 1)
            tokens.append(Token("OP", ch, line, col + 1))
            i += 1
            col += 1
            continue

        raise error(f"unexpected character {ch!r}")

    if tokens and tokens[-1].kind not in ("NEWLINE", "DEDENT"):
        tokens.append(Token("NEWLINE", "\n", line, col + 1))
    while len(indents) > 1:
        indents.pop()
        tokens.append(Token("DEDENT", "", line, 1))
    tokens.append(Token("EOF", "", line, col + 1))
    return tokens


def _string_token(text: str, i: int, line: int, col: int,
                  prefix: str) -> tuple[Token, int, int, int]:
    quote = text[i]
    start_line, start_col = line, col
    n = len(text)
    if text[i:i + 3] in ("'''", '"""'):
        closer = text[i:i + 3]
        i += 3
        col += 3
        start = i
        while i < n and text[i:i + 3] != closer:
            if text[i] == "\n":
                line += 1
                col = 0
            else:
                col += 1
            i += 1
        if i >= n:
            raise SourceSyntaxError("unterminated string", start_line, start_col + 1)
        value = text[start:i]
        i += 3
        col += 3
        return Token("STRING", value, start_line, start_col + 1, prefix), i, line, col
    i += 1
    col += 1
    out = []
    while i < n and text[i] not in (quote, "\n"):
        if text[i] == "\\" and i + 1 < n:
            esc = text[i + 1]
            out.append({"n": "\n", "t": "\t", "\\": "\\", quote: quote}.get(esc, "\\" + esc))
            i += 2
            col += 2
        else:
            out.append(text[i])
            i += 1
            col += 1
    if i >= n or text[i] != quote:
        raise SourceSyntaxError("unterminated string", start_line, start_col + 1)
    i += 1
    col += 1
    return Token("STRING", "".join(out), start_line, start_col + 1, prefix), i, line, col


# ---------------------------------------------------------------------------
# Syntax tree
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NodeBase:
    line: int


@dataclass(frozen=True)
class Module:
    body: tuple


# -- expressions --


@dataclass(frozen=True)
class Name(NodeBase):
    id: str


@dataclass(frozen=True)
class Num(NodeBase):
    value: int | float


@dataclass(frozen=True)
class Str(NodeBase):
    value: str


@dataclass(frozen=True)
class Bool(NodeBase):
    value: bool


@dataclass(frozen=True)
class NoneLit(NodeBase):
    pass


@dataclass(frozen=True)
class Attribute(NodeBase):
    value: object
    attr: str


@dataclass(frozen=True)
class Subscript(NodeBase):
    value: object
    index: object


@dataclass(frozen=True)
class Keyword:
    name: str
    value: object


@dataclass(frozen=True)
class Call(NodeBase):
    func: object
    args: tuple
    kwargs: tuple[Keyword, ...] = ()


@dataclass(frozen=True)
class TupleExpr(NodeBase):
    elts: tuple


@dataclass(frozen=True)
class UnaryOp(NodeBase):
    op: str  # "not" | "-" | "+"
    operand: object


@dataclass(frozen=True)
class BinOp(NodeBase):
    op: str  # + - * / // % **
    left: object
    right: object


@dataclass(frozen=True)
class Compare(NodeBase):
    op: str  # == != < <= > >= in notin
    left: object
    right: object


@dataclass(frozen=True)
class BoolOp(NodeBase):
    op: str  # and | or
    values: tuple


# -- statements --


@dataclass(frozen=True)
class Assign(NodeBase):
    targets: tuple  # Name | Attribute | Subscript | TupleExpr
    value: object


@dataclass(frozen=True)
class AugAssign(NodeBase):
    target: object
    op: str  # + - * / // % **
    value: object


@dataclass(frozen=True)
class ExprStmt(NodeBase):
    value: object


@dataclass(frozen=True)
class Return(NodeBase):
    value: object | None


@dataclass(frozen=True)
class Break(NodeBase):
    pass


@dataclass(frozen=True)
class Continue(NodeBase):
    pass


@dataclass(frozen=True)
class Pass(NodeBase):
    pass


@dataclass(frozen=True)
class Import(NodeBase):
    names: tuple[str, ...]


@dataclass(frozen=True)
class FunctionDef(NodeBase):
    name: str
    params: tuple[str, ...]
    body: tuple


@dataclass(frozen=True)
class For(NodeBase):
    target: object
    iter: object
    body: tuple


@dataclass(frozen=True)
class While(NodeBase):
    test: object
    body: tuple


@dataclass(frozen=True)
class If(NodeBase):
    test: object
    body: tuple
    orelse: tuple = ()


@dataclass(frozen=True)
class Opaque(NodeBase):
    """A retained statement outside the supported subset; extraction skips it."""

    text: str = ""


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_AUG_OPS = {"+=": "+", "-=": "-", "*=": "*", "/=": "/", "//=": "//",
            "%=": "%", "**=": "**"}
_COMPARE_OPS = {"==", "!=", "<", "<=", ">", ">="}


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0
        # Disabled while parsing for-loop targets so `for a, b in xs` does not
        # read `b in xs` as a containment test; bracketed contexts re-enable.
        self._in_allowed = True

    # -- token plumbing ------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at(self, kind: str, value: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (value is None or tok.value == value)

    def accept(self, kind: str, value: str | None = None) -> Token | None:
        if self.at(kind, value):
            return self.advance()
        return None

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.peek()
        if not self.at(kind, value):
            want = value or kind
            raise SourceSyntaxError(f"expected {want!r}, found {tok.value!r}",
                                    tok.line, tok.column)
        return self.advance()

    # -- statements ----------------------------------------------------------

    def parse_module(self) -> Module:
        body = []
        while not self.at("EOF"):
            body.append(self.parse_statement())
        return Module(tuple(body))

    def parse_statement(self):
        mark = self.pos
        try:
            return self._dispatch_statement()
        except _Unsupported:
            self.pos = mark
            return self.opaque_statement(consume_block=True)

    def _dispatch_statement(self):
        tok = self.peek()
        if tok.kind == "KEYWORD":
            if tok.value == "def":
                return self.parse_def()
            if tok.value == "for":
                return self.parse_for()
            if tok.value == "while":
                return self.parse_while()
            if tok.value == "if":
                return self.parse_if()
            if tok.value in ("return", "break", "continue", "pass"):
                return self.parse_small_keyword()
            if tok.value in ("import", "from"):
                return self.parse_import()
            if tok.value in ("elif", "else"):
                raise SourceSyntaxError(f"{tok.value!r} without a leading if",
                                        tok.line, tok.column)
        if tok.kind == "NAME" and tok.value in OPAQUE_KEYWORDS:
            return self.opaque_statement(consume_block=True)
        if tok.kind == "OP" and tok.value == "@":
            # Decorator line only; a following plain def still parses.
            return self.opaque_statement(consume_block=False)
        return self.parse_expr_statement()

    def parse_def(self) -> FunctionDef:
        start = self.expect("KEYWORD", "def")
        name = self.expect("NAME").value
        self.expect("OP", "(")
        params = []
        while not self.at("OP", ")"):
            params.append(self.expect("NAME").value)
            if self.accept("OP", "="):
                self.parse_expr()  # default value, kept but unused
            if not self.accept("OP", ","):
                break
        self.expect("OP", ")")
        self.expect("OP", ":")
        return FunctionDef(start.line, name, tuple(params), self.parse_suite())

    def parse_for(self) -> For:
        start = self.expect("KEYWORD", "for")
        saved = self._in_allowed
        self._in_allowed = False
        try:
            target = self.parse_target_list()
        finally:
            self._in_allowed = saved
        self.expect("KEYWORD", "in")
        iterable = self.parse_expr_or_tuple()
        self.expect("OP", ":")
        return For(start.line, target, iterable, self.parse_suite())

    def parse_while(self) -> While:
        start = self.expect("KEYWORD", "while")
        test = self.parse_expr()
        self.expect("OP", ":")
        return While(start.line, test, self.parse_suite())

    def parse_if(self) -> If:
        start = self.advance()  # if | elif
        test = self.parse_expr()
        self.expect("OP", ":")
        body = self.parse_suite()
        orelse: tuple = ()
        if self.at("KEYWORD", "elif"):
            orelse = (self.parse_if(),)
        elif self.accept("KEYWORD", "else"):
            self.expect("OP", ":")
            orelse = self.parse_suite()
        return If(start.line, test, body, orelse)

    def parse_suite(self) -> tuple:
        if self.accept("NEWLINE"):
            self.expect("INDENT")
            body = []
            while not self.at("DEDENT") and not self.at("EOF"):
                body.append(self.parse_statement())
            self.expect("DEDENT")
            return tuple(body)
        # Inline suite: `if done: break`
        stmt = self.parse_statement()
        return (stmt,)

    def parse_small_keyword(self):
        tok = self.advance()
        if tok.value == "return":
            value = None
            if not self.at("NEWLINE"):
                value = self.parse_expr_or_tuple()
            self.expect("NEWLINE")
            return Return(tok.line, value)
        self.expect("NEWLINE")
        if tok.value == "break":
            return Break(tok.line)
        if tok.value == "continue":
            return Continue(tok.line)
        return Pass(tok.line)

    def parse_import(self) -> Import:
        tok = self.advance()  # import | from
        names = []
        if tok.value == "from":
            names.append(self.parse_dotted_name())
            self.expect("KEYWORD", "import")
        while True:
            names.append(self.parse_dotted_name())
            if self.accept("KEYWORD", "as"):
                names[-1] = f"{names[-1]} as {self.expect('NAME').value}"
            if not self.accept("OP", ","):
                break
        self.expect("NEWLINE")
        return Import(tok.line, tuple(names))

    def parse_dotted_name(self) -> str:
        parts = [self.expect("NAME").value]
        while self.accept("OP", "."):
            parts.append(self.expect("NAME").value)
        return ".".join(parts)

    def parse_expr_statement(self):
        start = self.peek()
        first = self.parse_target_list()
        if self.at("OP") and self.peek().value in _AUG_OPS:
            op = self.advance().value
            value = self.parse_expr_or_tuple()
            self._end_simple_statement()
            if not isinstance(first, (Name, Attribute, Subscript)):
                raise SourceSyntaxError("invalid augmented-assignment target",
                                        start.line, start.column)
            return AugAssign(start.line, first, _AUG_OPS[op], value)
        if self.at("OP", "="):
            targets = [first]
            while self.accept("OP", "="):
                targets.append(self.parse_expr_or_tuple())
            value = targets.pop()
            self._end_simple_statement()
            for t in targets:
                _check_target(t, start)
            return Assign(start.line, tuple(targets), value)
        self._end_simple_statement()
        return ExprStmt(start.line, first)

    def _end_simple_statement(self) -> None:
        if self.at("OP", ";"):
            raise _Unsupported("statement list on one line")
        self.expect("NEWLINE")

    def parse_target_list(self):
        # A target list is parsed as a general expression-or-tuple; assignment
        # context validates the shape afterwards.
        return self.parse_expr_or_tuple()

    def opaque_statement(self, consume_block: bool) -> Opaque:
        start = self.peek()
        parts = []
        ends_with_colon = False
        while not self.at("NEWLINE") and not self.at("EOF"):
            tok = self.advance()
            parts.append(tok.value)
            ends_with_colon = tok.kind == "OP" and tok.value == ":"
        self.accept("NEWLINE")
        if consume_block and ends_with_colon and self.at("INDENT"):
            depth = 0
            while True:
                tok = self.advance()
                if tok.kind == "INDENT":
                    depth += 1
                elif tok.kind == "DEDENT":
                    depth -= 1
                    if depth == 0:
                        break
                elif tok.kind == "EOF":
                    break
        return Opaque(start.line, " ".join(str(p) for p in parts))

    # -- expressions ---------------------------------------------------------

    def parse_expr_or_tuple(self):
        start = self.peek()
        first = self.parse_expr()
        if not self.at("OP", ","):
            return first
        elts = [first]
        while self.accept("OP", ","):
            if self.at("NEWLINE") or self.at("OP", ")") or self.at("OP", "]") \
                    or self.at("OP", ":") or self.at("OP", "=") \
                    or (self.at("OP") and self.peek().value in _AUG_OPS) \
                    or self.at("KEYWORD", "in"):
                break
            elts.append(self.parse_expr())
        return TupleExpr(start.line, tuple(elts))

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        start = self.peek()
        left = self.parse_and()
        values = [left]
        while self.accept("KEYWORD", "or"):
            values.append(self.parse_and())
        if len(values) == 1:
            return left
        return BoolOp(start.line, "or", tuple(values))

    def parse_and(self):
        start = self.peek()
        left = self.parse_not()
        values = [left]
        while self.accept("KEYWORD", "and"):
            values.append(self.parse_not())
        if len(values) == 1:
            return left
        return BoolOp(start.line, "and", tuple(values))

    def parse_not(self):
        tok = self.peek()
        if self.accept("KEYWORD", "not"):
            return UnaryOp(tok.line, "not", self.parse_not())
        return self.parse_comparison()

    def parse_comparison(self):
        start = self.peek()
        left = self.parse_arith()
        tok = self.peek()
        if tok.kind == "OP" and tok.value in _COMPARE_OPS:
            op = self.advance().value
            right = self.parse_arith()
            node = Compare(start.line, op, left, right)
            nxt = self.peek()
            if nxt.kind == "OP" and nxt.value in _COMPARE_OPS:
                raise _Unsupported("chained comparison")
            return node
        if self._in_allowed and tok.kind == "KEYWORD" and tok.value == "in":
            self.advance()
            right = self.parse_arith()
            return Compare(start.line, "in", left, right)
        if self._in_allowed and tok.kind == "KEYWORD" and tok.value == "not" and \
                self.peek(1).kind == "KEYWORD" and self.peek(1).value == "in":
            self.advance()
            self.advance()
            right = self.parse_arith()
            return Compare(start.line, "notin", left, right)
        return left

    def parse_arith(self):
        left = self.parse_term()
        while self.at("OP") and self.peek().value in ("+", "-"):
            tok = self.advance()
            right = self.parse_term()
            left = BinOp(tok.line, tok.value, left, right)
        return left

    def parse_term(self):
        left = self.parse_factor()
        while self.at("OP") and self.peek().value in ("*", "/", "//", "%"):
            tok = self.advance()
            right = self.parse_factor()
            left = BinOp(tok.line, tok.value, left, right)
        return left

    def parse_factor(self):
        tok = self.peek()
        if tok.kind == "OP" and tok.value in ("-", "+"):
            self.advance()
            return UnaryOp(tok.line, tok.value, self.parse_factor())
        return self.parse_power()

    def parse_power(self):
        base = self.parse_postfix()
        if self.at("OP", "**"):
            tok = self.advance()
            return BinOp(tok.line, "**", base, self.parse_factor())
        return base

    def parse_postfix(self):
        node = self.parse_atom()
        while True:
            tok = self.peek()
            if self.accept("OP", "."):
                attr = self.expect("NAME").value
                node = Attribute(tok.line, node, attr)
            elif self.at("OP", "("):
                node = self.parse_call(node)
            elif self.accept("OP", "["):
                saved = self._in_allowed
                self._in_allowed = True
                try:
                    index = self.parse_expr_or_tuple()
                finally:
                    self._in_allowed = saved
                if self.at("OP", ":"):
                    raise _Unsupported("slice expression")
                self.expect("OP", "]")
                node = Subscript(tok.line, node, index)
            else:
                return node

    def parse_call(self, func) -> Call:
        start = self.expect("OP", "(")
        saved = self._in_allowed
        self._in_allowed = True
        try:
            return self._parse_call_tail(start, func)
        finally:
            self._in_allowed = saved

    def _parse_call_tail(self, start: Token, func) -> Call:
        args = []
        kwargs = []
        while not self.at("OP", ")"):
            tok = self.peek()
            if tok.kind == "OP" and tok.value == "*":
                raise _Unsupported("star argument")
            if tok.kind == "NAME" and self.peek(1).kind == "OP" \
                    and self.peek(1).value == "=" :
                name = self.advance().value
                self.advance()
                kwargs.append(Keyword(name, self.parse_expr()))
            else:
                if kwargs:
                    raise SourceSyntaxError("positional argument after keyword",
                                            tok.line, tok.column)
                args.append(self.parse_expr())
            if not self.accept("OP", ","):
                break
        self.expect("OP", ")")
        return Call(start.line, func, tuple(args), tuple(kwargs))

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            text = tok.value
            value: int | float
            if any(c in text for c in ".eE"):
                value = float(text)
            else:
                value = int(text)
            return Num(tok.line, value)
        if tok.kind == "STRING":
            if "f" in tok.prefix:
                raise _Unsupported("f-string")
            self.advance()
            return Str(tok.line, tok.value)
        if tok.kind == "KEYWORD":
            if tok.value in ("True", "False"):
                self.advance()
                return Bool(tok.line, tok.value == "True")
            if tok.value == "None":
                self.advance()
                return NoneLit(tok.line)
            if tok.value == "not":
                return self.parse_not()
            raise _Unsupported(f"keyword {tok.value!r} in expression")
        if tok.kind == "NAME":
            if tok.value in OPAQUE_KEYWORDS:
                raise _Unsupported(f"{tok.value} expression")
            self.advance()
            return Name(tok.line, tok.value)
        if tok.kind == "OP" and tok.value == "(":
            self.advance()
            if self.accept("OP", ")"):
                return TupleExpr(tok.line, ())
            saved = self._in_allowed
            self._in_allowed = True
            try:
                inner = self.parse_expr_or_tuple()
            finally:
                self._in_allowed = saved
            if self.at("KEYWORD", "for"):
                raise _Unsupported("generator expression")
            self.expect("OP", ")")
            return inner
        if tok.kind == "OP" and tok.value in ("[", "{"):
            raise _Unsupported("container display")
        raise SourceSyntaxError(f"unexpected token {tok.value!r}", tok.line, tok.column)


def _check_target(node, start: Token) -> None:
    if isinstance(node, (Name, Attribute, Subscript)):
        return
    if isinstance(node, TupleExpr):
        for e in node.elts:
            _check_target(e, start)
        return
    raise SourceSyntaxError("invalid assignment target", start.line, start.column)


def parse(source: SourceUnit) -> Module:
    """Parse a source unit into a module tree over the supported subset."""
    return _Parser(tokenize(source)).parse_module()


def parse_text(text: str, path: str = "<string>") -> Module:
    return parse(SourceUnit(path, text))


def walk(node) -> list:
    """Every tree node (statements and expressions) in depth-first order."""
    out = []
    stack = [node]
    while stack:
        cur = stack.pop()
        out.append(cur)
        for attr in ("body", "orelse", "targets", "elts", "args", "values"):
            stack.extend(getattr(cur, attr, ()) or ())
        for attr in ("value", "func", "target", "iter", "test", "left", "right",
                     "operand", "index"):
            child = getattr(cur, attr, None)
            if child is not None and not isinstance(child, (str, int, float, bool)):
                stack.append(child)
        for kw in getattr(cur, "kwargs", ()) or ():
            stack.append(kw.value)
    return out
