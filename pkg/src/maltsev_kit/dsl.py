"""A small language for congruence identities.

Grammar::

    identity := expr "<=" expr (";" clause)*
    clause   := "forall" name ("," name)* ":" sort | "param" name ("=" INT)?
    sort     := "congruence" | "tolerance" | "representable" | "relation"
    expr     := comp ("+" comp)*
    comp     := meet (("o" | "o[" (INT | name) "]") meet)*
    meet     := atom ("&" atom)*
    atom     := name | "conv(" expr ")" | "(" expr ")"

All binary operators associate to the left. ``e1 o[k] e2`` is the alternating
composition ``e1 o e2 o e1 o ...`` with ``k`` factors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

SORTS = ("congruence", "tolerance", "representable", "relation")
KEYWORDS = {"o", "conv", "forall", "param"}


class IdentitySyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Var:
    name: str
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Meet:
    left: "RelExpr"
    right: "RelExpr"


@dataclass(frozen=True)
class Join:
    left: "RelExpr"
    right: "RelExpr"


@dataclass(frozen=True)
class Comp:
    left: "RelExpr"
    right: "RelExpr"


@dataclass(frozen=True)
class CompK:
    left: "RelExpr"
    right: "RelExpr"
    count: Union[int, str]
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Conv:
    arg: "RelExpr"


RelExpr = Union[Var, Meet, Join, Comp, CompK, Conv]


@dataclass(frozen=True)
class IdentityAST:
    lhs: RelExpr
    rhs: RelExpr
    quantifiers: tuple[tuple[str, str], ...] = ()
    params: tuple[tuple[str, int | None], ...] = ()

    @property
    def variables(self) -> list[str]:
        return [v for v, _ in self.quantifiers]

    def sort_of(self, name: str) -> str:
        return dict(self.quantifiers)[name]

    def param_defaults(self) -> dict[str, int]:
        return {p: v for p, v in self.params if v is not None}

    def __str__(self):
        return pretty_print(self)


# --- lexer -----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n)
  | (?P<le><=) | (?P<ok>o\[)
  | (?P<int>\d+) | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[&+(),;:=\]])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        col = i - line_start + 1
        if not m:
            raise IdentitySyntaxError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind == "name" and m.group() in KEYWORDS:
            tokens.append(Token(m.group(), m.group(), line, col))
        elif kind == "sym":
            tokens.append(Token(m.group(), m.group(), line, col))
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, col))
        i = m.end()
    tokens.append(Token("eof", "", line, len(text) - line_start + 1))
    return tokens


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise IdentitySyntaxError(f"{msg}, found {found}", tok.line, tok.col)

    def take(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.error(f"expected {kind!r}")
        t = self.tok
        self.i += 1
        return t

    def identity(self) -> IdentityAST:
        lhs = self.expr()
        self.take("le")
        rhs = self.expr()
        quants, params = [], []
        where: dict[str, tuple[int, int]] = {}
        while self.tok.kind == ";":
            self.i += 1
            if self.tok.kind == "forall":
                self.i += 1
                names = [self.take("name")]
                while self.tok.kind == ",":
                    self.i += 1
                    names.append(self.take("name"))
                self.take(":")
                sort_tok = self.take("name")
                if sort_tok.text not in SORTS:
                    self.error(f"unknown sort (expected one of {', '.join(SORTS)})", sort_tok)
                for t in names:
                    if any(q == t.text for q, _ in quants):
                        raise IdentitySyntaxError(
                            f"variable {t.text!r} quantified twice", t.line, t.col)
                    quants.append((t.text, sort_tok.text))
                    where.setdefault(t.text, (t.line, t.col))
            elif self.tok.kind == "param":
                self.i += 1
                name = self.take("name")
                if any(q == name.text for q, _ in params):
                    raise IdentitySyntaxError(f"parameter {name.text!r} declared twice",
                                              name.line, name.col)
                where[name.text] = (name.line, name.col)
                value = None
                if self.tok.kind == "=":
                    self.i += 1
                    value = int(self.take("int").text)
                    if value < 1:
                        self.error("parameter value must be >= 1", self.tokens[self.i - 1])
                params.append((name.text, value))
            else:
                self.error("expected 'forall' or 'param'")
        if self.tok.kind != "eof":
            self.error("unexpected input")
        ast = IdentityAST(lhs, rhs, tuple(quants), tuple(params))
        _validate(ast, where)
        return ast

    def expr(self) -> RelExpr:
        e = self.comp()
        while self.tok.kind == "+":
            self.i += 1
            e = Join(e, self.comp())
        return e

    def comp(self) -> RelExpr:
        e = self.meet()
        while self.tok.kind in ("o", "ok"):
            if self.tok.kind == "o":
                self.i += 1
                e = Comp(e, self.meet())
            else:
                self.i += 1
                t = self.tok
                if self.tok.kind == "int":
                    self.i += 1
                    count: int | str = int(t.text)
                    if count < 1:
                        self.error("composition count must be >= 1", t)
                elif self.tok.kind == "name":
                    t = self.take("name")
                    count = t.text
                else:
                    self.error("expected an integer or parameter name")
                self.take("]")
                e = CompK(e, self.meet(), count, (t.line, t.col))
        return e

    def meet(self) -> RelExpr:
        e = self.atom()
        while self.tok.kind == "&":
            self.i += 1
            e = Meet(e, self.atom())
        return e

    def atom(self) -> RelExpr:
        t = self.tok
        if t.kind == "name":
            self.i += 1
            return Var(t.text, (t.line, t.col))
        if t.kind == "conv":
            self.i += 1
            self.take("(")
            e = self.expr()
            self.take(")")
            return Conv(e)
        if t.kind == "(":
            self.i += 1
            e = self.expr()
            self.take(")")
            return e
        self.error("expected a relation name, 'conv(' or '('")


def walk(e: RelExpr) -> Iterator[RelExpr]:
    yield e
    if isinstance(e, Var):
        return
    if isinstance(e, Conv):
        yield from walk(e.arg)
    else:
        yield from walk(e.left)
        yield from walk(e.right)


def _validate(ast: IdentityAST, where: dict[str, tuple[int, int]] | None = None) -> None:
    where = where or {}
    quantified = {v for v, _ in ast.quantifiers}
    params = {p for p, _ in ast.params}
    if len(params) != len(ast.params):
        raise IdentitySyntaxError("parameter declared twice", 1, 1)
    clash = quantified & params
    if clash:
        name = sorted(clash)[0]
        raise IdentitySyntaxError(f"{name!r} is both a variable and a parameter",
                                  *where.get(name, (1, 1)))
    for side in (ast.lhs, ast.rhs):
        for node in walk(side):
            if isinstance(node, Var):
                line, col = node.pos or (1, 1)
                if node.name in params:
                    raise IdentitySyntaxError(
                        f"parameter {node.name!r} used outside a composition count",
                        line, col)
                if node.name not in quantified:
                    raise IdentitySyntaxError(f"unbound variable {node.name!r}", line, col)
            elif isinstance(node, CompK) and isinstance(node.count, str):
                if node.count not in params:
                    raise IdentitySyntaxError(f"undeclared parameter {node.count!r}",
                                              *(node.pos or (1, 1)))


def parse_identity(text: str) -> IdentityAST:
    return _Parser(text).identity()


def parse_expr(text: str) -> RelExpr:
    """Parse a bare relation expression (no quantifier checking)."""
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error("unexpected input")
    return e


# --- printer ---------------------------------------------------------------

def _prec(e: RelExpr) -> int:
    if isinstance(e, Join):
        return 1
    if isinstance(e, (Comp, CompK)):
        return 2
    if isinstance(e, Meet):
        return 3
    return 4


def expr_to_text(e: RelExpr, parent: RelExpr | None = None, right: bool = False) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Conv):
        return f"conv({expr_to_text(e.arg)})"
    if isinstance(e, Join):
        op = "+"
    elif isinstance(e, Comp):
        op = "o"
    elif isinstance(e, CompK):
        op = f"o[{e.count}]"
    elif isinstance(e, Meet):
        op = "&"
    else:
        raise TypeError(f"not a relation expression: {e!r}")
    s = f"{expr_to_text(e.left, e)} {op} {expr_to_text(e.right, e, True)}"
    if parent is None:
        return s
    mine, theirs = _prec(e), _prec(parent)
    # meets are bracketed inside compositions and joins for readability
    if mine < theirs or (mine == theirs and right) or (mine > theirs and mine != 4
                                                        and theirs < 3):
        return f"({s})"
    return s


def pretty_print(ast: IdentityAST) -> str:
    parts = [f"{expr_to_text(ast.lhs)} <= {expr_to_text(ast.rhs)}"]
    groups: list[tuple[str, list[str]]] = []
    for v, s in ast.quantifiers:
        if groups and groups[-1][0] == s:
            groups[-1][1].append(v)
        else:
            groups.append((s, [v]))
    for s, names in groups:
        parts.append(f"forall {', '.join(names)}: {s}")
    for p, v in ast.params:
        parts.append(f"param {p}" if v is None else f"param {p}={v}")
    return " ; ".join(parts)
