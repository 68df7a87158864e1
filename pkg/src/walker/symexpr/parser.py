"""Recursive-descent parser for the expression grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' INT)?
    base   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')' | '-' base

NUMBER is a decimal literal read as an exact rational. Note that unary minus
binds tighter than ``^``: ``-x1^2`` is ``(-x1)^2``.

Two literal folds keep printing and parsing inverse to each other: negating
a numeric constant yields a negative constant, and dividing two numeric
constants yields their quotient.
"""
from __future__ import annotations

import re
from collections.abc import Iterable
from fractions import Fraction

from ..errors import ParseError, UnknownIdentifierError
from .expr import FUNCTIONS, Const, Expr, Func, Neg, Pow, Product, Quotient, Sum, Var

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _negate(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Product) and isinstance(e.factors[0], Const):
        return Product((Const(-e.factors[0].value),) + e.factors[1:])
    return Neg(e)


def _divide(num: Expr, den: Expr) -> Expr:
    if isinstance(num, Const) and isinstance(den, Const) and den.value != 0:
        return Const(num.value / den.value)
    return Quotient(num, den)


class _Parser:
    def __init__(self, text: str, names: frozenset[str] | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def expr(self) -> Expr:
        terms = [self.term()]
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else _negate(t))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> Expr:
        factors = [self.factor()]
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.factor()
            if op == "*":
                factors.append(rhs)
            else:
                left = factors[0] if len(factors) == 1 else Product(tuple(factors))
                factors = [_divide(left, rhs)]
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self) -> Expr:
        base = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            kind, text, pos = self.take()
            if kind != "num" or not text.isdigit():
                raise ParseError("expected integer exponent", pos)
            n = sign * int(text)
            if n == 0:
                raise ParseError("zero exponent", pos)
            return Pow(base, n)
        return base

    def base(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "num":
            return Const(Fraction(text))
        if kind == "ident":
            if self.peek()[:2] == ("op", "("):
                if text not in FUNCTIONS:
                    raise UnknownIdentifierError(text, pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            if self.names is not None and text not in self.names:
                raise UnknownIdentifierError(text, pos)
            if text in FUNCTIONS:
                raise ParseError(f"function {text!r} needs an argument", pos)
            return Var(text)
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "op" and text == "-":
            return _negate(self.base())
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {found}", pos)


def parse(text: str, chart: Iterable[str] | None = None) -> Expr:
    """Parse ``text``; identifiers must be coordinate names of ``chart``
    (a :class:`~walker.metric.Chart` or any iterable of names). ``None``
    accepts any identifier."""
    names = None
    if chart is not None:
        names = frozenset(getattr(chart, "names", chart))
    p = _Parser(text, names)
    e = p.expr()
    kind, tok, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {tok!r}", pos)
    return e
