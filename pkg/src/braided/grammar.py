"""A small recursive-descent expression grammar shared by every text input.

The grammar covers integers, identifiers, ``+ - * / ^`` and parentheses.
Identifiers may carry an index suffix such as ``n_1^2`` so that matrix
generators read naturally.  Evaluation is delegated to two callbacks, so the
same parser builds scalars, noncommutative polynomials or operators.
"""

from __future__ import annotations

import re
from typing import Any, Callable

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*(?:_\d+(?:\^\d+)?)?)|(?P<op>[-+*/^()]))"
)


class ParseError(ValueError):
    """Raised on malformed input; carries a 1-based line and column."""

    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}")
        self.message = message
        self.line = line
        self.column = col


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, atom: Callable[[str], Any], number: Callable[[int], Any]):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.atom = atom
        self.number = number

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok[2])

    def parse(self):
        value = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                value = value * rhs
            else:
                try:
                    value = value / rhs
                except ZeroDivisionError:
                    self.fail("division by zero", tok)
                except TypeError:
                    self.fail("unsupported division", tok)
        return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            value = self.unary()
            return -value if tok[1] == "-" else value
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            tok = self.take()
            exponent = self._exponent()
            try:
                return base ** exponent
            except (ZeroDivisionError, TypeError, ValueError) as exc:
                self.fail(f"invalid power ({exc})", tok)
        return base

    def _exponent(self) -> int:
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            value = self._exponent()
            if self.take()[1] != ")":
                self.fail("expected ')' in exponent")
            return value
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            sign = -1
        tok = self.take()
        if tok[0] != "num":
            self.fail("exponent must be an integer", tok)
        return sign * int(tok[1])

    def primary(self):
        tok = self.take()
        if tok[0] == "num":
            return self.number(int(tok[1]))
        if tok[0] == "name":
            try:
                return self.atom(tok[1])
            except KeyError:
                self.fail(f"unknown symbol {tok[1]!r}", tok)
        if tok[0] == "op" and tok[1] == "(":
            value = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return value
        self.fail("unexpected end of input" if tok[0] == "end" else f"unexpected token {tok[1]!r}", tok)


def parse_expression(text: str, atom: Callable[[str], Any], number: Callable[[int], Any]) -> Any:
    """Parse ``text`` and fold it with the given callbacks.

    ``atom`` maps an identifier to a value and raises KeyError for unknown
    names; ``number`` maps a non-negative integer literal to a value.
    """
    if not text.strip():
        raise ParseError("empty expression", text, 0)
    return _Parser(text, atom, number).parse()
