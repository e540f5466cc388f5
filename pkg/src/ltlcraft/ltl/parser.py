"""Surface syntax for task formulas.

Grammar, loosest to tightest binding::

    impl    := or ( "->" impl )?            right-associative
    or      := and ( "|" and )*             left-associative
    and     := until ( "&" until )*         left-associative
    until   := unary ( ("U" | "R") until )? right-associative
    unary   := ("!" | "X" | "F" | "G") unary | atom
    atom    := "true" | "false" | ident | "(" impl ")"

``a -> b`` is desugared to ``!a | b`` while parsing.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    FALSE, PROP_NAME, TRUE, And, Always, Eventually, Formula, Implies, Next, Not, Op,
    Or, Prop, Release, Until,
)


class LTLSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f"; expected one of: {', '.join(sorted(self.expected))}"
        super().__init__(detail)


@dataclass(frozen=True)
class Token:
    kind: str  # op symbol, "ident", "true", "false" or "eof"
    text: str
    line: int
    column: int


_TOKEN = re.compile(r"\s+|->|[!&|()]|[A-Za-z_][A-Za-z0-9_]*")
_KEYWORD_OPS = {"X", "F", "G", "U", "R"}
_UNARY_START = {"!", "X", "F", "G"}
_ATOM_START = {"(", "true", "false", "ident"}
_OPERAND_START = _UNARY_START | _ATOM_START


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        column = pos - line_start + 1
        if m is None:
            raise LTLSyntaxError(f"unexpected character {text[pos]!r}", line, column)
        chunk = m.group()
        if chunk[0].isspace():
            nl = chunk.count("\n")
            if nl:
                line += nl
                line_start = pos + chunk.rfind("\n") + 1
        elif chunk in _KEYWORD_OPS or chunk in ("->", "!", "&", "|", "(", ")"):
            tokens.append(Token(chunk, chunk, line, column))
        elif chunk in ("true", "false"):
            tokens.append(Token(chunk, chunk, line, column))
        elif PROP_NAME.match(chunk):
            tokens.append(Token("ident", chunk, line, column))
        else:
            raise LTLSyntaxError(f"invalid identifier {chunk!r}", line, column)
        pos = m.end()
    tokens.append(Token("eof", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, expected):
        t = self.tok
        what = "unexpected end of input" if t.kind == "eof" else f"unexpected token {t.text!r}"
        shown = {"identifier" if e == "ident" else e for e in expected}
        raise LTLSyntaxError(what, t.line, t.column, shown)

    def take(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail({kind})
        t = self.tok
        self.pos += 1
        return t

    def parse(self) -> Formula:
        phi = self.implication()
        if self.tok.kind != "eof":
            self.fail({"->", "|", "&", "U", "R", "eof"} if self.tok.kind != ")" else {"eof"})
        return phi

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.tok.kind == "->":
            self.pos += 1
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.tok.kind == "|":
            self.pos += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.until()
        while self.tok.kind == "&":
            self.pos += 1
            left = And(left, self.until())
        return left

    def until(self) -> Formula:
        left = self.unary()
        if self.tok.kind == "U":
            self.pos += 1
            return Until(left, self.until())
        if self.tok.kind == "R":
            self.pos += 1
            return Release(left, self.until())
        return left

    def unary(self) -> Formula:
        kind = self.tok.kind
        if kind in _UNARY_START:
            self.pos += 1
            arg = self.unary()
            return {"!": Not, "X": Next, "F": Eventually, "G": Always}[kind](arg)
        return self.atom()

    def atom(self) -> Formula:
        t = self.tok
        if t.kind == "true":
            self.pos += 1
            return TRUE
        if t.kind == "false":
            self.pos += 1
            return FALSE
        if t.kind == "ident":
            self.pos += 1
            return Prop(t.text)
        if t.kind == "(":
            self.pos += 1
            phi = self.implication()
            if self.tok.kind != ")":
                self.fail({")", "->", "|", "&", "U", "R"})
            self.pos += 1
            return phi
        self.fail(_OPERAND_START)


def parse(text: str) -> Formula:
    """Parse a formula; raises ``LTLSyntaxError`` with position information."""
    return _Parser(text).parse()


# binding strength used by the printer; higher binds tighter
_LEVEL = {Op.OR: 2, Op.AND: 3, Op.UNTIL: 4, Op.RELEASE: 4}
_RIGHT_ASSOC = {Op.UNTIL, Op.RELEASE}
_ATOMIC_LEVEL = 6
_UNARY_LEVEL = 5


def _level(phi: Formula) -> int:
    if phi.op in _LEVEL:
        return _LEVEL[phi.op]
    if phi.args:
        return _UNARY_LEVEL
    return _ATOMIC_LEVEL


def pretty(phi: Formula) -> str:
    """Render ``phi`` in the surface syntax, with minimal parentheses."""
    op = phi.op
    if op is Op.TRUE:
        return "true"
    if op is Op.FALSE:
        return "false"
    if op is Op.PROP:
        return phi.name
    if len(phi.args) == 1:
        (arg,) = phi.args
        inner = pretty(arg)
        if _level(arg) < _UNARY_LEVEL:
            inner = f"({inner})"
        sep = "" if op is Op.NOT else " "
        return f"{op.value}{sep}{inner}"
    left, right = phi.args
    level = _LEVEL[op]
    ls, rs = pretty(left), pretty(right)
    ll, rl = _level(left), _level(right)
    if ll < level or (ll == level and op in _RIGHT_ASSOC):
        ls = f"({ls})"
    if rl < level or (rl == level and op not in _RIGHT_ASSOC):
        rs = f"({rs})"
    return f"{ls} {op.value} {rs}"
