"""A small exact computer-algebra core for scalar expressions."""
from .calculus import differentiate, gradient, substitute
from .expr import (FUNCTIONS, ONE, ZERO, Const, Expr, Func, Neg, Pow, Product, Quotient,
                   Sum, Var, as_expr, free_variables, to_string)
from .normal import Rat, from_rat, simplify, to_rat
from .numeric import DEFAULT_SEED, compile_expr, evaluate, is_zero, zero_tolerance
from .parser import parse


def is_const(e) -> bool:
    return to_rat(as_expr(e)).is_const()


def const_value(e):
    """Exact rational value of a constant expression (``ValueError`` if not constant)."""
    r = to_rat(as_expr(e))
    if not r.is_const():
        raise ValueError(f"{to_string(as_expr(e))} is not constant")
    return r.const_value()


__all__ = [
    "Expr", "Const", "Var", "Sum", "Product", "Pow", "Quotient", "Neg", "Func",
    "FUNCTIONS", "ZERO", "ONE", "as_expr", "free_variables", "to_string",
    "parse", "simplify", "differentiate", "gradient", "substitute",
    "evaluate", "compile_expr", "is_zero", "zero_tolerance", "is_const", "const_value",
    "Rat", "to_rat", "from_rat", "DEFAULT_SEED",
]
