"""Differentiation and substitution."""
from __future__ import annotations

from collections.abc import Mapping

from .expr import Const, Expr, Func, Neg, Pow, Product, Quotient, Sum, Var, as_expr
from .normal import from_rat, to_rat


def differentiate(e: Expr, var: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to ``var``, simplified."""
    return from_rat(to_rat(as_expr(e)).diff(var))


def gradient(e: Expr, names) -> list[Expr]:
    r = to_rat(as_expr(e))
    return [from_rat(r.diff(v)) for v in names]


def substitute(e: Expr, values: Mapping[str, object]) -> Expr:
    """Replace variables by expressions (or numbers). The result is raw;
    call :func:`simplify` for the canonical form."""
    values = {k: as_expr(v) for k, v in values.items()}
    memo: dict[int, Expr] = {}

    def walk(node: Expr) -> Expr:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        if isinstance(node, Var):
            out = values.get(node.name, node)
        elif isinstance(node, Const):
            out = node
        elif isinstance(node, Sum):
            out = Sum(tuple(walk(t) for t in node.terms))
        elif isinstance(node, Product):
            out = Product(tuple(walk(f) for f in node.factors))
        elif isinstance(node, Pow):
            out = Pow(walk(node.base), node.exp)
        elif isinstance(node, Quotient):
            out = Quotient(walk(node.num), walk(node.den))
        elif isinstance(node, Neg):
            out = Neg(walk(node.arg))
        else:
            out = Func(node.name, walk(node.arg))
        memo[id(node)] = out
        return out

    return walk(as_expr(e))
