"""Canonical form: rational functions over atoms with exact coefficients.

An *atom* is a coordinate variable or an elementary function applied to a
canonical argument. A polynomial is a dict ``{monomial: Fraction}`` where a
monomial packs atom exponents into one integer (``SHIFT`` bits per atom id),
so multiplying monomials is integer addition. A :class:`Rat` is a pair of
polynomials; only common monomial content and scalar multiples are cancelled
(there is no polynomial gcd).

The rule set applied by :func:`simplify` is fixed: flatten sums and
products, fold rational constants, expand products over sums, collect
identical monomials, collapse ``x^1``, cancel common monomial factors of a
quotient, and fold ``sin(0)``, ``cos(0)``, ``exp(0)``, ``log(1)``.
"""
from __future__ import annotations

import threading
from fractions import Fraction

from ..errors import DomainError
from .expr import (ONE, ZERO, Const, Expr, Func, Neg, Pow, Product, Quotient,
                   Sum, Var, as_expr, sort_key)

SHIFT = 16
MASK = (1 << SHIFT) - 1

_lock = threading.Lock()
_atoms: list[Expr] = []
_atom_ids: dict[Expr, int] = {}
_atom_keys: list[tuple] = []


def atom_id(atom: Expr) -> int:
    idx = _atom_ids.get(atom)
    if idx is None:
        with _lock:
            idx = _atom_ids.get(atom)
            if idx is None:
                idx = len(_atoms)
                _atoms.append(atom)
                _atom_keys.append(sort_key(atom))
                _atom_ids[atom] = idx
    return idx


def atom(idx: int) -> Expr:
    return _atoms[idx]


def decode(mono: int) -> list[tuple[int, int]]:
    out = []
    idx = 0
    while mono:
        e = mono & MASK
        if e:
            out.append((idx, e))
        mono >>= SHIFT
        idx += 1
    return out


def degree(mono: int) -> int:
    return sum(e for _, e in decode(mono))


def mono_key(mono: int) -> tuple:
    parts = sorted(decode(mono), key=lambda p: _atom_keys[p[0]])
    return (-sum(e for _, e in parts), tuple((_atom_keys[i], -e) for i, e in parts))


def unit(idx: int) -> int:
    return 1 << (SHIFT * idx)


# polynomials ---------------------------------------------------------------

def p_add(p: dict, q: dict, sign: int = 1) -> dict:
    out = dict(p)
    for m, c in q.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def p_scale(p: dict, c) -> dict:
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def p_mul(p: dict, q: dict) -> dict:
    if len(p) > len(q):
        p, q = q, p
    out: dict = {}
    get = out.get
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = m1 + m2
            out[m] = get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


def p_pow(p: dict, n: int) -> dict:
    result = {0: Fraction(1)}
    base = p
    while n:
        if n & 1:
            result = p_mul(result, base)
        n >>= 1
        if n:
            base = p_mul(base, base)
    return result


def p_const(c) -> dict:
    c = Fraction(c)
    return {0: c} if c else {}


def p_is_const(p: dict) -> bool:
    return not p or (len(p) == 1 and 0 in p)


def p_atoms(p: dict) -> set[int]:
    out = set()
    for m in p:
        out.update(i for i, _ in decode(m))
    return out


def _min_content(polys) -> int:
    """Largest monomial dividing every monomial of every polynomial."""
    common = None
    for p in polys:
        for m in p:
            exps = dict(decode(m))
            if common is None:
                common = exps
            else:
                common = {i: min(e, exps[i]) for i, e in common.items() if i in exps}
            if not common:
                return 0
    return sum(e << (SHIFT * i) for i, e in (common or {}).items())


def leading(p: dict) -> int:
    return min(p, key=mono_key)


# rational functions --------------------------------------------------------

class Rat:
    """Quotient of two polynomials, denominator normalised to leading
    coefficient 1 (or identically 1)."""

    __slots__ = ("num", "den")

    def __init__(self, num: dict, den: dict | None = None, *, normalized=False):
        if normalized:
            self.num, self.den = num, den
            return
        den = den if den is not None else {0: Fraction(1)}
        if not den:
            raise DomainError("division by zero")
        if not num:
            self.num, self.den = {}, {0: Fraction(1)}
            return
        if p_is_const(den):
            c = den[0]
            self.num, self.den = (num if c == 1 else p_scale(num, 1 / c)), {0: Fraction(1)}
            return
        content = _min_content((num, den))
        if content:
            num = {m - content: c for m, c in num.items()}
            den = {m - content: c for m, c in den.items()}
            if p_is_const(den):
                self.num, self.den = p_scale(num, 1 / den[0]), {0: Fraction(1)}
                return
        lead = leading(den)
        lc = den[lead]
        if lc != 1:
            num = p_scale(num, 1 / lc)
            den = p_scale(den, 1 / lc)
        if len(num) == len(den) and lead in num:
            ratio = num[lead]
            if all(num.get(m) == ratio * c for m, c in den.items()):
                num, den = {0: ratio}, {0: Fraction(1)}
        self.num, self.den = num, den

    @classmethod
    def const(cls, c) -> "Rat":
        return cls(p_const(c), {0: Fraction(1)}, normalized=True)

    @classmethod
    def from_atom(cls, atom_expr: Expr) -> "Rat":
        return cls({unit(atom_id(atom_expr)): Fraction(1)}, {0: Fraction(1)}, normalized=True)

    @property
    def is_poly(self) -> bool:
        return self.den == {0: 1}

    def is_zero(self) -> bool:
        return not self.num

    def is_const(self) -> bool:
        return self.is_poly and p_is_const(self.num)

    def const_value(self) -> Fraction:
        return self.num.get(0, Fraction(0))

    def atoms(self) -> set[int]:
        return p_atoms(self.num) | p_atoms(self.den)

    def __eq__(self, other):
        return isinstance(other, Rat) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((frozenset(self.num.items()), frozenset(self.den.items())))

    def __add__(self, other: "Rat") -> "Rat":
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            if self.is_poly:
                return Rat(p_add(self.num, other.num), self.den, normalized=True)
            return Rat(p_add(self.num, other.num), self.den)
        return Rat(p_add(p_mul(self.num, other.den), p_mul(other.num, self.den)),
                   p_mul(self.den, other.den))

    def __neg__(self) -> "Rat":
        return Rat(p_scale(self.num, -1), self.den, normalized=True)

    def __sub__(self, other: "Rat") -> "Rat":
        return self + (-other)

    def __mul__(self, other: "Rat") -> "Rat":
        if not self.num or not other.num:
            return Rat.const(0)
        if self.is_poly and other.is_poly:
            return Rat(p_mul(self.num, other.num), self.den, normalized=True)
        return Rat(p_mul(self.num, other.num), p_mul(self.den, other.den))

    def scale(self, c) -> "Rat":
        return Rat(p_scale(self.num, Fraction(c)), self.den, normalized=True) if c else Rat.const(0)

    def inverse(self) -> "Rat":
        if not self.num:
            raise DomainError("division by zero")
        return Rat(self.den, self.num)

    def __truediv__(self, other: "Rat") -> "Rat":
        return self * other.inverse()

    def __pow__(self, n: int) -> "Rat":
        if n < 0:
            return self.inverse() ** (-n)
        if self.is_poly:
            return Rat(p_pow(self.num, n), self.den, normalized=True)
        return Rat(p_pow(self.num, n), p_pow(self.den, n))

    def diff(self, var: str) -> "Rat":
        dn = poly_diff(self.num, var)
        if self.is_poly:
            return dn
        dd = poly_diff(self.den, var)
        den = Rat(self.den, {0: Fraction(1)}, normalized=True)
        num = Rat(self.num, {0: Fraction(1)}, normalized=True)
        return (dn * den - num * dd) / (den * den)

    def to_expr(self) -> Expr:
        return from_rat(self)


# calculus on atoms ---------------------------------------------------------

_diff_cache: dict[tuple[int, str], Rat] = {}


def _atom_diff(idx: int, var: str) -> Rat:
    key = (idx, var)
    hit = _diff_cache.get(key)
    if hit is not None:
        return hit
    a = _atoms[idx]
    if isinstance(a, Var):
        out = Rat.const(1 if a.name == var else 0)
    else:
        inner = to_rat(a.arg)
        du = inner.diff(var)
        if du.is_zero():
            out = Rat.const(0)
        elif a.name == "sin":
            out = make_func("cos", inner) * du
        elif a.name == "cos":
            out = -(make_func("sin", inner) * du)
        elif a.name == "exp":
            out = make_func("exp", inner) * du
        else:
            out = du / inner
    _diff_cache[key] = out
    return out


def poly_diff(p: dict, var: str) -> Rat:
    direct: dict = {}
    extra = Rat.const(0)
    for m, c in p.items():
        for idx, e in decode(m):
            a = _atoms[idx]
            rest = m - unit(idx)
            if isinstance(a, Var):
                if a.name == var:
                    direct[rest] = direct.get(rest, 0) + c * e
                continue
            d = _atom_diff(idx, var)
            if d.is_zero():
                continue
            extra = extra + Rat({rest: c * e}, normalized=True, den={0: Fraction(1)}) * d
    direct = {m: c for m, c in direct.items() if c}
    return Rat(direct, {0: Fraction(1)}, normalized=True) + extra


_FOLDS = {("sin", 0): 0, ("cos", 0): 1, ("exp", 0): 1, ("log", 1): 0}


def make_func(name: str, arg: Rat) -> Rat:
    if arg.is_const():
        v = arg.const_value()
        folded = _FOLDS.get((name, v))
        if folded is not None:
            return Rat.const(folded)
        if name == "log" and v <= 0:
            raise DomainError(f"log of non-positive constant {v}")
    return Rat.from_atom(Func(name, from_rat(arg)))


# conversion ----------------------------------------------------------------

def to_rat(e: Expr) -> Rat:
    cached = e._rat
    if cached is not None:
        return cached
    if isinstance(e, Const):
        r = Rat.const(e.value)
    elif isinstance(e, Var):
        r = Rat.from_atom(e)
    elif isinstance(e, Sum):
        r = Rat.const(0)
        for t in e.terms:
            r = r + to_rat(t)
    elif isinstance(e, Product):
        r = Rat.const(1)
        for f in e.factors:
            r = r * to_rat(f)
    elif isinstance(e, Neg):
        r = -to_rat(e.arg)
    elif isinstance(e, Pow):
        base = to_rat(e.base)
        if e.exp < 0 and base.is_zero():
            raise DomainError("zero raised to a negative power", e)
        r = base ** e.exp
    elif isinstance(e, Quotient):
        den = to_rat(e.den)
        if den.is_zero():
            raise DomainError("division by zero", e)
        r = to_rat(e.num) / den
    elif isinstance(e, Func):
        r = make_func(e.name, to_rat(e.arg))
    else:
        raise TypeError(f"not an expression: {e!r}")
    e._rat = r
    return r


def _term(mono: int, c: Fraction) -> Expr:
    parts = sorted(decode(mono), key=lambda p: _atom_keys[p[0]])
    factors = [_atoms[i] if e == 1 else Pow(_atoms[i], e) for i, e in parts]
    if not factors:
        return Const(c)
    body = factors[0] if len(factors) == 1 else Product(tuple(factors))
    if c == 1:
        return body
    if c == -1:
        return Neg(body)
    return Product((Const(c),) + tuple(factors))


def poly_to_expr(p: dict) -> Expr:
    if not p:
        return ZERO
    terms = [_term(m, p[m]) for m in sorted(p, key=mono_key)]
    return terms[0] if len(terms) == 1 else Sum(tuple(terms))


def from_rat(r: Rat) -> Expr:
    num = poly_to_expr(r.num)
    if r.is_poly:
        out = num
    else:
        out = Quotient(num, poly_to_expr(r.den))
    out._rat = r
    return out


def simplify(e) -> Expr:
    """Canonical form of ``e``; idempotent."""
    e = as_expr(e)
    return from_rat(to_rat(e))


__all__ = ["Rat", "simplify", "to_rat", "from_rat", "make_func", "ONE"]
