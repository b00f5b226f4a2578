"""Closed expression language for coefficient formulas in problem files.

Grammar: numeric literals, the variables x and a, binary + - * /, unary
minus, parentheses, and the functions sinh, cosh, exp, abs, sqrt, sgn
(one argument) and max, min (two arguments).  sgn(0) evaluates to 1, the
convention used by the bang-bang policies.

Expressions evaluate with numpy semantics and broadcast over array
arguments.  Parse errors carry the character position.
"""

import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class ExpressionError(ValueError):
    """Malformed expression; ``position`` is the character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


_FUNCTIONS = {
    "sinh": (1, np.sinh),
    "cosh": (1, np.cosh),
    "exp": (1, np.exp),
    "abs": (1, np.abs),
    "sqrt": (1, np.sqrt),
    "sgn": (1, lambda v: np.where(np.asarray(v, dtype=float) >= 0.0, 1.0, -1.0)),
    "max": (2, np.maximum),
    "min": (2, np.minimum),
}

_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/(),])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    position: int


def _tokenize(source: str):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", n))
    return tokens


@dataclass(frozen=True, eq=False)
class Expression:
    """A parsed expression; call with (x, a) to evaluate."""

    source: str
    variables: tuple
    _fn: Callable = field(repr=False)

    def __call__(self, x, a=None):
        with np.errstate(all="ignore"):
            return self._fn(x, a)

    def __eq__(self, other):
        return isinstance(other, Expression) and self.source == other.source

    def __hash__(self):
        return hash(self.source)


class _Parser:
    def __init__(self, tokens, variables):
        self.tokens = tokens
        self.variables = variables
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind == "op" and tok.text == text:
            return self.advance()
        shown = tok.text or "end of input"
        raise ExpressionError(f"expected {text!r}, found {shown!r}", tok.position)

    def parse_expression(self):
        node = self.parse_term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.parse_term()
            lhs = node
            if op == "+":
                node = lambda x, a, l=lhs, r=rhs: l(x, a) + r(x, a)
            else:
                node = lambda x, a, l=lhs, r=rhs: l(x, a) - r(x, a)
        return node

    def parse_term(self):
        node = self.parse_unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            rhs = self.parse_unary()
            lhs = node
            if op == "*":
                node = lambda x, a, l=lhs, r=rhs: l(x, a) * r(x, a)
            else:
                node = lambda x, a, l=lhs, r=rhs: np.true_divide(l(x, a), r(x, a))
        return node

    def parse_unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            inner = self.parse_unary()
            return lambda x, a, f=inner: np.negative(f(x, a))
        return self.parse_atom()

    def parse_atom(self):
        tok = self.advance()
        if tok.kind == "num":
            value = float(tok.text)
            return lambda x, a, c=value: c
        if tok.kind == "ident":
            name = tok.text
            if name in _FUNCTIONS:
                arity, fn = _FUNCTIONS[name]
                self.expect("(")
                args = [self.parse_expression()]
                while self.peek().kind == "op" and self.peek().text == ",":
                    self.advance()
                    args.append(self.parse_expression())
                self.expect(")")
                if len(args) != arity:
                    raise ExpressionError(
                        f"{name} takes {arity} argument(s), got {len(args)}", tok.position
                    )
                if arity == 1:
                    arg = args[0]
                    return lambda x, a, f=fn, g=arg: f(g(x, a))
                first, second = args
                return lambda x, a, f=fn, g1=first, g2=second: f(g1(x, a), g2(x, a))
            if name == "x":
                if "x" not in self.variables:
                    raise ExpressionError("variable 'x' is not allowed here", tok.position)
                return lambda x, a: x
            if name == "a":
                if "a" not in self.variables:
                    raise ExpressionError("variable 'a' is not allowed here", tok.position)
                return lambda x, a: a
            raise ExpressionError(f"unknown identifier {name!r}", tok.position)
        if tok.kind == "op" and tok.text == "(":
            node = self.parse_expression()
            self.expect(")")
            return node
        shown = tok.text or "end of input"
        raise ExpressionError(f"unexpected {shown!r}", tok.position)


def parse(source: str, variables=("x", "a")) -> Expression:
    """Parse an expression over the given variables ("x" and/or "a")."""
    tokens = _tokenize(source)
    parser = _Parser(tokens, tuple(variables))
    fn = parser.parse_expression()
    trailing = parser.peek()
    if trailing.kind != "end":
        raise ExpressionError(f"unexpected trailing input {trailing.text!r}", trailing.position)
    return Expression(source=source, variables=tuple(variables), _fn=fn)
