"""Floating-point evaluation and zero testing.

Evaluation is IEEE double precision throughout.
"""
from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from contextlib import contextmanager
from contextvars import ContextVar
from fractions import Fraction

import numpy as np

from ..errors import DomainError
from ..verdict import Confidence, Verdict
from .expr import Const, Expr, Neg, Pow, Product, Quotient, Sum, Var, as_expr, natural_key
from .normal import Rat, _atoms, decode, from_rat, to_rat

DEFAULT_SEED = 42
ZERO_SAMPLES = 32
ZERO_TOL = 1e-9
SAMPLE_BOX = 2.0

_tolerance: ContextVar[float] = ContextVar("zero_tolerance", default=ZERO_TOL)


def _apply(name: str, x: float, node: Expr) -> float:
    if name == "sin":
        return math.sin(x)
    if name == "cos":
        return math.cos(x)
    if name == "exp":
        try:
            return math.exp(x)
        except OverflowError:
            raise DomainError("exp overflow", node) from None
    if x <= 0:
        raise DomainError("log of non-positive value", node)
    return math.log(x)


def evaluate(e: Expr, point: Mapping[str, float]) -> float:
    """Value of ``e`` at ``point``.

    Raises :class:`DomainError` naming the offending subexpression for a
    zero denominator or a logarithm of a non-positive number.
    """
    def ev(node: Expr) -> float:
        if isinstance(node, Const):
            return float(node.value)
        if isinstance(node, Var):
            try:
                return float(point[node.name])
            except KeyError:
                raise DomainError(f"no value for coordinate {node.name!r}", node) from None
        if isinstance(node, Sum):
            return math.fsum(ev(t) for t in node.terms)
        if isinstance(node, Product):
            out = 1.0
            for f in node.factors:
                out *= ev(f)
            return out
        if isinstance(node, Pow):
            base = ev(node.base)
            if base == 0 and node.exp < 0:
                raise DomainError("division by zero", node)
            return base ** node.exp
        if isinstance(node, Quotient):
            den = ev(node.den)
            if den == 0:
                raise DomainError("division by zero", node)
            return ev(node.num) / den
        if isinstance(node, Neg):
            return -ev(node.arg)
        return _apply(node.name, ev(node.arg), node)

    return ev(as_expr(e))


# compilation ---------------------------------------------------------------

def _source(e: Expr) -> str:
    if isinstance(e, Const):
        v = e.value
        return repr(float(v)) if v.denominator != 1 else f"{v.numerator}.0"
    if isinstance(e, Var):
        return f"_v[{e.name!r}]"
    if isinstance(e, Sum):
        return "(" + " + ".join(_source(t) for t in e.terms) + ")"
    if isinstance(e, Product):
        return "(" + " * ".join(_source(f) for f in e.factors) + ")"
    if isinstance(e, Pow):
        if e.exp > 0:
            return f"({_source(e.base)} ** {e.exp})"
        return f"(1.0 / {_source(e.base)} ** {-e.exp})"
    if isinstance(e, Quotient):
        return f"({_source(e.num)} / {_source(e.den)})"
    if isinstance(e, Neg):
        return f"(-{_source(e.arg)})"
    return f"_m.{e.name}({_source(e.arg)})"


def compile_expr(e: Expr, names: Sequence[str], vectorized: bool = False):
    """Return a fast callable ``fn(*values)`` evaluating the canonical form
    of ``e``. With ``vectorized`` the callable accepts numpy arrays and
    returns nan/inf instead of raising at singular points."""
    body = _source(from_rat(to_rat(as_expr(e))))
    args = ", ".join(f"_a{i}" for i in range(len(names)))
    binds = ", ".join(f"{n!r}: _a{i}" for i, n in enumerate(names))
    code = f"def _fn({args}):\n    _v = {{{binds}}}\n    return {body}\n"
    namespace = {"_m": np if vectorized else math}
    exec(code, namespace)
    fn = namespace["_fn"]
    if vectorized:
        return fn

    def checked(*values):
        try:
            return fn(*values)
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise DomainError(str(exc), e) from None

    return checked


# zero testing --------------------------------------------------------------

def _atom_values(indices, point: Mapping[str, float]) -> dict[int, float]:
    vals = {}
    for idx in indices:
        a = _atoms[idx]
        vals[idx] = float(point[a.name]) if isinstance(a, Var) else evaluate(a, point)
    return vals


def _poly_terms(p: dict, vals: dict[int, float]) -> list[float]:
    out = []
    for m, c in p.items():
        t = float(c)
        for idx, k in decode(m):
            t *= vals[idx] ** k
        out.append(t)
    return out


def _poly_exact(p: dict, point: Mapping[str, Fraction]) -> Fraction:
    total = Fraction(0)
    for m, c in p.items():
        t = c
        for idx, k in decode(m):
            t *= point[_atoms[idx].name] ** k
        total += t
    return total


def _variables(r: Rat) -> list[str]:
    names = set()
    stack = [_atoms[i] for i in r.atoms()]
    while stack:
        a = stack.pop()
        if isinstance(a, Var):
            names.add(a.name)
        else:
            stack.extend(a.children)
    return sorted(names, key=natural_key)


def _only_variables(r: Rat) -> bool:
    return all(isinstance(_atoms[i], Var) for i in r.atoms())


@contextmanager
def zero_tolerance(tol: float):
    """Temporarily change the default tolerance of :func:`is_zero`."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    token = _tolerance.set(tol)
    try:
        yield
    finally:
        _tolerance.reset(token)


def is_zero(e: Expr | Rat, rng: np.random.Generator | None = None,
            samples: int = ZERO_SAMPLES, tol: float | None = None) -> Verdict:
    """Decide whether ``e`` vanishes identically.

    Rational functions in the coordinates are decided exactly from the
    expanded normal form; a nonzero verdict carries a witness point.
    Expressions with sin/cos/exp/log atoms are sampled at ``samples``
    points of [-2, 2]^n and tagged PROBABILISTIC. ``tol`` defaults to the
    value set by :func:`zero_tolerance`.
    """
    if tol is None:
        tol = _tolerance.get()
    r = e if isinstance(e, Rat) else to_rat(as_expr(e))
    if r.is_zero():
        return Verdict(True, Confidence.EXACT)
    names = _variables(r)
    if _only_variables(r):
        return Verdict(False, Confidence.EXACT, _exact_witness(r, names, rng))

    rng = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    num_atoms = sorted(r.atoms())
    valid = 0
    attempts = 0
    while valid < samples and attempts < 8 * samples:
        attempts += 1
        point = {n: float(x) for n, x in zip(names, rng.uniform(-SAMPLE_BOX, SAMPLE_BOX, len(names)))}
        try:
            vals = _atom_values(num_atoms, point)
            terms = _poly_terms(r.num, vals)
            den = math.fsum(_poly_terms(r.den, vals))
        except DomainError:
            continue
        if not all(math.isfinite(t) for t in terms) or abs(den) < tol:
            continue
        valid += 1
        total = math.fsum(terms)
        scale = max(1.0, math.fsum(abs(t) for t in terms))
        if abs(total) > tol * scale:
            return Verdict(False, Confidence.PROBABILISTIC, point,
                           f"value {total / den:.3e} at sampled point")
    if valid == 0:
        raise DomainError("no admissible sample point", from_rat(r))
    return Verdict(True, Confidence.PROBABILISTIC, None, f"vanished at {valid} sampled points")


def _exact_witness(r: Rat, names, rng) -> dict:
    candidates = [{n: Fraction(1) for n in names}]
    gen = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    for _ in range(200):
        candidates.append({n: Fraction(int(v)) for n, v in zip(names, gen.integers(-6, 7, len(names)))})
    for point in candidates:
        if _poly_exact(r.num, point) != 0 and _poly_exact(r.den, point) != 0:
            return {n: (int(v) if v.denominator == 1 else float(v)) for n, v in point.items()}
    return {}
