"""Concrete syntax.

    term     := sum
    sum      := xor ('+' xor)*
    xor      := prod ('^' prod)*
    prod     := unary ('&' unary)*
    unary    := '~' unary | atom
    atom     := '0' | '1' | VAR | 'c'I '(' term ')' | 'd'I ',' J | '(' term ')'
    equation := term ('=' | '<=') term

Variables match [a-z][a-z0-9_]*, except the keywords cN and dN.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import (BINARY, Complement, Cyl, Diag, Equation, One, Product, Sum, SymDiff,
                    Term, Var, Zero, check_indices, leq)


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int, text: str, line: int | None = None):
        self.pos = pos
        self.line = line
        self.text = text
        where = f"line {line}, col {pos + 1}" if line is not None else f"col {pos + 1}"
        super().__init__(f"{msg} at {where}")


_TOKEN = re.compile(r"\s*(?:(<=)|([a-z][a-z0-9_]*)|(\d+)|([()+&^~=,]))")
_CYL = re.compile(r"c(\d+)$")
_DIAG = re.compile(r"d(\d+)$")


@dataclass
class _Tok:
    kind: str   # 'id', 'num', 'op', 'end'
    val: str
    pos: int


def _tokenize(text: str, line=None) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text, line)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(_Tok("op", "<=", start))
        elif m.group(2):
            toks.append(_Tok("id", m.group(2), start))
        elif m.group(3):
            toks.append(_Tok("num", m.group(3), start))
        else:
            toks.append(_Tok("op", m.group(4), start))
        pos = m.end()
    toks.append(_Tok("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, line=None):
        self.text = text
        self.line = line
        self.toks = _tokenize(text, line)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.pos, self.text, self.line)

    def expect(self, val):
        t = self.peek()
        if t.kind == "op" and t.val == val:
            return self.take()
        found = "end of input" if t.kind == "end" else repr(t.val)
        self.fail(f"expected {val!r}, found {found}")

    def binary(self, sub, op, node):
        left = sub()
        while self.peek().kind == "op" and self.peek().val == op:
            self.take()
            left = node(left, sub())
        return left

    def term(self):
        return self.binary(self.xor, "+", Sum)

    def xor(self):
        return self.binary(self.prod, "^", SymDiff)

    def prod(self):
        return self.binary(self.unary, "&", Product)

    def unary(self):
        t = self.peek()
        if t.kind == "op" and t.val == "~":
            self.take()
            return Complement(self.unary())
        return self.atom()

    def atom(self):
        t = self.take()
        if t.kind == "num":
            if t.val == "0":
                return Zero()
            if t.val == "1":
                return One()
            self.fail(f"unexpected number {t.val}", t)
        if t.kind == "id":
            m = _CYL.match(t.val)
            if m:
                self.expect("(")
                inner = self.term()
                self.expect(")")
                return Cyl(int(m.group(1)), inner)
            m = _DIAG.match(t.val)
            if m:
                self.expect(",")
                j = self.take()
                if j.kind != "num":
                    self.fail("expected index after ','", j)
                return Diag(int(m.group(1)), int(j.val))
            return Var(t.val)
        if t.kind == "op" and t.val == "(":
            inner = self.term()
            self.expect(")")
            return inner
        found = "end of input" if t.kind == "end" else repr(t.val)
        self.fail(f"unexpected {found}", t)

    def equation(self):
        lhs = self.term()
        t = self.peek()
        if t.kind == "op" and t.val in ("=", "<="):
            self.take()
            rhs = self.term()
            self.end()
            return Equation(lhs, rhs) if t.val == "=" else leq(lhs, rhs)
        self.end()
        return lhs

    def end(self):
        t = self.peek()
        if t.kind != "end":
            self.fail(f"unexpected {t.val!r}")


def parse(text: str, dim: int | None = None, line: int | None = None):
    """Parse a term or an equation.  `a <= b` becomes `a + b = b`."""
    if not text.strip():
        raise ParseError("empty input", 0, text, line)
    out = _Parser(text, line).equation()
    if dim is not None:
        check_indices(out, dim)
    return out


def parse_term(text: str, dim: int | None = None) -> Term:
    out = parse(text, dim)
    if isinstance(out, Equation):
        raise ParseError("expected a term, found an equation", 0, text)
    return out


def parse_equation(text: str, dim: int | None = None) -> Equation:
    out = parse(text, dim)
    if not isinstance(out, Equation):
        raise ParseError("expected an equation", len(text), text)
    return out


def parse_equations(text: str, dim: int | None = None) -> list[Equation]:
    """One equation per line; '#' starts a comment."""
    out = []
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        e = parse(body, dim, line=n)
        if not isinstance(e, Equation):
            raise ParseError("expected an equation", len(body), body, n)
        out.append(e)
    return out


def format_term(t: Term, top: bool = True) -> str:
    """Canonical fully parenthesized form; parse(format_term(t)) == t."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Diag):
        return f"d{t.i},{t.j}"
    if isinstance(t, Complement):
        return "~" + format_term(t.arg, False)
    if isinstance(t, Cyl):
        return f"c{t.index}({format_term(t.arg, True)})"
    if isinstance(t, BINARY):
        op = {Sum: "+", Product: "&", SymDiff: "^"}[type(t)]
        body = f"{format_term(t.left, False)} {op} {format_term(t.right, False)}"
        return body if top else f"({body})"
    raise TypeError(f"not a term: {t!r}")


def format_equation(e: Equation) -> str:
    return f"{format_term(e.lhs)} = {format_term(e.rhs)}"
