"""Immutable expression trees over named coordinates.

Nodes are built raw by the arithmetic operators; call :func:`simplify` to
obtain the canonical form. Every node caches its hash and, once computed,
its rational-function normal form.
"""
from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational

FUNCTIONS = ("sin", "cos", "exp", "log")

# printing precedence
_SUM, _PRODUCT, _UNARY, _POWER, _ATOM = 1, 2, 3, 4, 5


class Expr:
    __slots__ = ("_hash", "_rat")

    def __init__(self):
        self._hash = None
        self._rat = None

    # structural identity -------------------------------------------------
    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        return hash(self) == hash(other) and self._key() == other._key()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self._key()))
        return self._hash

    @property
    def children(self) -> tuple["Expr", ...]:
        return ()

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"Expr({to_string(self)!r})"

    # raw construction ----------------------------------------------------
    def __add__(self, other):
        return Sum((self, as_expr(other)))

    def __radd__(self, other):
        return Sum((as_expr(other), self))

    def __sub__(self, other):
        return Sum((self, Neg(as_expr(other))))

    def __rsub__(self, other):
        return Sum((as_expr(other), Neg(self)))

    def __mul__(self, other):
        return Product((self, as_expr(other)))

    def __rmul__(self, other):
        return Product((as_expr(other), self))

    def __truediv__(self, other):
        return Quotient(self, as_expr(other))

    def __rtruediv__(self, other):
        return Quotient(as_expr(other), self)

    def __pow__(self, n):
        return Pow(self, n)

    def __neg__(self):
        return Neg(self)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        super().__init__()
        if isinstance(value, float):
            value = Fraction(str(value))
        self.value = Fraction(value)

    def _key(self):
        return (self.value,)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        super().__init__()
        self.name = name

    def _key(self):
        return (self.name,)


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        super().__init__()
        self.terms = tuple(terms)
        if len(self.terms) < 2:
            raise ValueError("Sum needs at least two terms")

    def _key(self):
        return self.terms

    @property
    def children(self):
        return self.terms


class Product(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        super().__init__()
        self.factors = tuple(factors)
        if len(self.factors) < 2:
            raise ValueError("Product needs at least two factors")

    def _key(self):
        return self.factors

    @property
    def children(self):
        return self.factors


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: int):
        super().__init__()
        if isinstance(exp, bool) or not isinstance(exp, int) or exp == 0:
            raise ValueError(f"power needs a nonzero integer exponent, got {exp!r}")
        self.base = base
        self.exp = exp

    def _key(self):
        return (self.base, self.exp)

    @property
    def children(self):
        return (self.base,)


class Quotient(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num: Expr, den: Expr):
        super().__init__()
        self.num = num
        self.den = den

    def _key(self):
        return (self.num, self.den)

    @property
    def children(self):
        return (self.num, self.den)


class Neg(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        super().__init__()
        self.arg = arg

    def _key(self):
        return (self.arg,)

    @property
    def children(self):
        return (self.arg,)


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        super().__init__()
        if name not in FUNCTIONS:
            raise ValueError(f"unsupported function {name!r}")
        self.name = name
        self.arg = arg

    def _key(self):
        return (self.name, self.arg)

    @property
    def children(self):
        return (self.arg,)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Rational, float)) and not isinstance(value, bool):
        return Const(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


ZERO = Const(0)
ONE = Const(1)


def free_variables(e: Expr) -> frozenset[str]:
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        else:
            stack.extend(node.children)
    return frozenset(out)


# ordering ------------------------------------------------------------------

_NAME_PARTS = re.compile(r"(\d+)")


def natural_key(name: str) -> tuple:
    parts = _NAME_PARTS.split(name)
    return tuple(int(p) if i % 2 else p for i, p in enumerate(parts) if p != "" or i == 0)


def sort_key(e: Expr) -> tuple:
    """Total order on expressions used for canonical term ordering."""
    if isinstance(e, Const):
        return (0, e.value)
    if isinstance(e, Var):
        return (1, natural_key(e.name))
    if isinstance(e, Func):
        return (2, e.name, sort_key(e.arg))
    if isinstance(e, Pow):
        return (3, sort_key(e.base), e.exp)
    if isinstance(e, Product):
        return (4, tuple(sort_key(f) for f in e.factors))
    if isinstance(e, Sum):
        return (5, tuple(sort_key(t) for t in e.terms))
    if isinstance(e, Quotient):
        return (6, sort_key(e.num), sort_key(e.den))
    return (7, sort_key(e.arg))


# printing ------------------------------------------------------------------

def _const_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _precedence(e: Expr) -> int:
    if isinstance(e, Const):
        if e.value < 0:
            return _UNARY
        return _ATOM if e.value.denominator == 1 else _PRODUCT
    if isinstance(e, (Var, Func)):
        return _ATOM
    if isinstance(e, Pow):
        return _POWER
    if isinstance(e, Neg):
        return _UNARY
    if isinstance(e, (Product, Quotient)):
        return _PRODUCT
    return _SUM


def _wrap(e: Expr, minimum: int) -> str:
    text = to_string(e)
    return f"({text})" if _precedence(e) < minimum else text


def _is_negative_term(e: Expr) -> bool:
    if isinstance(e, Const):
        return e.value < 0
    if isinstance(e, Neg):
        return True
    return (isinstance(e, Product) and isinstance(e.factors[0], Const)
            and e.factors[0].value < 0)


def _negated_text(e: Expr) -> str:
    """Text of ``-e`` for a negative term, printed after a binary minus."""
    if isinstance(e, Const):
        return _const_text(-e.value)
    if isinstance(e, Neg):
        return _wrap(e.arg, _PRODUCT)
    lead = Const(-e.factors[0].value)
    return to_string(Product((lead,) + e.factors[1:]))


def to_string(e: Expr) -> str:
    """Render ``e`` in the input grammar; parsing the result rebuilds ``e``
    for every canonical (simplified) expression."""
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Pow):
        return f"{_wrap(e.base, _ATOM)}^{e.exp}"
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _ATOM)
    if isinstance(e, Product):
        head, *rest = e.factors
        parts = [to_string(head) if isinstance(head, Const) else _wrap(head, _POWER)]
        parts += [_wrap(f, _POWER) for f in rest]
        return "*".join(parts)
    if isinstance(e, Quotient):
        num = e.num
        if isinstance(num, (Product, Quotient, Neg)) or (isinstance(num, Const)):
            left = to_string(num)
        else:
            left = _wrap(num, _PRODUCT)
        return f"{left}/{_wrap(e.den, _POWER)}"
    # Sum
    head, *rest = e.terms
    out = [_wrap(head, _PRODUCT) if isinstance(head, Sum) else to_string(head)]
    for t in rest:
        if _is_negative_term(t):
            out.append(" - " + _negated_text(t))
        else:
            out.append(" + " + _wrap(t, _PRODUCT))
    return "".join(out)
