"""Maurer-Cartan forms, developing maps along curves and deformation scans.

Conventions. A form omega = sum_i omega^i e_i satisfies the Maurer-Cartan
equation when, for every k and coordinate pair (i, j),

    d_i omega^k_j - d_j omega^k_i + sum_{a,b} c^k_ab omega^a_i omega^b_j = 0.

This is the equation of the left logarithmic derivative omega = M^-1 dM,
so the developing map solves M' = M A(t) with A = sum_i omega^i(gamma') M_i
and M(0) = I. Along a concatenated path the later piece multiplies on the
right: develop(g1 . g2) = develop(g1) develop(g2).
"""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import exact, symmatrix
from .distribution import VectorField, sample_points
from .errors import DomainError, RankError, RepresentationError, StepUnderflowError
from .liealg import ClassificationLabel, LieAlgebra, classify, jacobi_check
from .metric import Chart
from .symexpr import (Const, Rat, Var, compile_expr, differentiate, evaluate, free_variables,
                      from_rat, is_zero, parse, simplify, substitute, to_rat)
from .symexpr.normal import _atoms, decode
from .verdict import Confidence, Verdict

DEFAULT_STEP_FRACTION = 1e-3
PATH_TOL = 1e-6


class MaurerCartanForm:
    """Algebra-valued 1-form: ``components[i][j]`` is omega^i_j (the d x^j
    coefficient of the i-th coframe form)."""

    def __init__(self, chart: Chart, components, algebra: LieAlgebra, rng=None, check: bool = True):
        if len(components) != algebra.dim:
            raise ValueError(f"need {algebra.dim} component forms, got {len(components)}")
        self.chart = chart
        self.algebra = algebra
        self.components = tuple(tuple(chart.bind(x) for x in row) for row in components)
        if any(len(row) != chart.n for row in self.components):
            raise ValueError(f"each form needs {chart.n} coefficients")
        if check:
            self._check_surjective(rng)

    def _check_surjective(self, rng):
        r = self.algebra.dim
        for point in sample_points(self.chart, rng):
            try:
                m = [[evaluate(x, point) for x in row] for row in self.components]
            except DomainError:
                continue
            if exact.numeric_rank(m) != r:
                raise RankError("form is not surjective onto the algebra", point)

    @cached_property
    def rat(self) -> list[list[Rat]]:
        return [[to_rat(x) for x in row] for row in self.components]

    @cached_property
    def _compiled(self):
        return [[compile_expr(x, self.chart.names, vectorized=True) for x in row]
                for row in self.components]

    def values(self, points: np.ndarray) -> np.ndarray:
        """Array (len(points), r, n) of coefficients at an array of points."""
        cols = [points[:, j] for j in range(self.chart.n)]
        out = np.empty((len(points), self.algebra.dim, self.chart.n))
        with np.errstate(all="ignore"):
            for i, row in enumerate(self._compiled):
                for j, fn in enumerate(row):
                    out[:, i, j] = np.broadcast_to(fn(*cols), len(points))
        if not np.all(np.isfinite(out)):
            raise DomainError("form is singular along the curve")
        return out

    def describe(self) -> list[str]:
        out = []
        for i, row in enumerate(self.components):
            terms = []
            for name, x in zip(self.chart.names, row):
                text = str(x)
                if text == "0":
                    continue
                terms.append(f"d{name}" if text == "1" else f"({text})*d{name}")
            out.append(f"omega^{i + 1} = " + (" + ".join(terms) or "0"))
        return out


def build_mc_form(D_frame: Sequence[VectorField], complement: Sequence[VectorField],
                  L: LieAlgebra, rng=None) -> MaurerCartanForm:
    """omega^i dual to the i-th field of ``D_frame`` and vanishing on the complement."""
    fields = list(D_frame) + list(complement)
    if not fields:
        raise ValueError("empty frame")
    chart = fields[0].chart
    n = chart.n
    if len(fields) != n:
        raise RankError(f"frame has {len(fields)} fields on a {n}-dimensional chart")
    for point in sample_points(chart, rng):
        try:
            m = [f.at(point) for f in fields]
        except DomainError:
            continue
        if exact.numeric_rank(m) != n:
            raise RankError("frame is rank-deficient", point)
    F = [[fields[c].rat[i] for c in range(n)] for i in range(n)]
    try:
        Finv, _ = symmatrix.adjugate_inverse(F)
    except ZeroDivisionError:
        raise RankError("frame is singular") from None
    comps = [[from_rat(x) for x in Finv[i]] for i in range(len(D_frame))]
    return MaurerCartanForm(chart, comps, L, rng)


def mc_check(omega: MaurerCartanForm, rng=None) -> Verdict:
    L = omega.algebra
    r = L.dim
    names = omega.chart.names
    w = omega.rat
    verdicts = []
    for k in range(r):
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                value = w[k][j].diff(names[i]) - w[k][i].diff(names[j])
                for a in range(r):
                    for b in range(r):
                        c = L.c[a][b][k]
                        if c and w[a][i].num and w[b][j].num:
                            value = value + (w[a][i] * w[b][j]).scale(_fraction(c))
                v = is_zero(value, rng)
                if not v:
                    return Verdict(False, v.confidence, v.witness,
                                   f"component {k + 1} on (d{names[i]}, d{names[j]}): {from_rat(value)}")
                verdicts.append(v)
    return Verdict.all_of(verdicts, "Maurer-Cartan equation holds")


def _fraction(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


# representations -----------------------------------------------------------

class GroupRepresentation:
    """Matrices M_1..M_r with [M_i, M_j] = sum_k c^k_ij M_k, checked exactly."""

    def __init__(self, algebra: LieAlgebra, matrices):
        self.algebra = algebra
        self.matrices = [exact.to_fractions(m) for m in matrices]
        if len(self.matrices) != algebra.dim:
            raise RepresentationError(f"need {algebra.dim} generators")
        size = len(self.matrices[0])
        if any(len(m) != size or any(len(row) != size for row in m) for m in self.matrices):
            raise RepresentationError("generators must be square matrices of one size")
        self.size = size
        r = algebra.dim
        for i in range(r):
            for j in range(i + 1, r):
                a, b = self.matrices[i], self.matrices[j]
                ab, ba = exact.matmul(a, b), exact.matmul(b, a)
                for p in range(size):
                    for q in range(size):
                        want = sum((Fraction(algebra.c[i][j][k]) * self.matrices[k][p][q]
                                    for k in range(r)), Fraction(0))
                        if ab[p][q] - ba[p][q] != want:
                            raise RepresentationError(
                                f"[M{i + 1}, M{j + 1}] differs from the bracket at entry ({p + 1},{q + 1})")
        self.numeric = np.array([[[float(x) for x in row] for row in m] for m in self.matrices])

    @classmethod
    def builtin(cls, algebra: LieAlgebra) -> "GroupRepresentation":
        """Translations for abelian algebras, unitriangular 3x3 matrices for
        the Heisenberg algebra [e1,e2]=e3, and 2x2 upper triangular matrices
        for [e1,e2]=e1."""
        r = algebra.dim
        if not algebra.nonzero_brackets():
            mats = []
            for i in range(r):
                m = [[0] * (r + 1) for _ in range(r + 1)]
                m[i][r] = 1
                mats.append(m)
            return cls(algebra, mats)
        if algebra == LieAlgebra.from_brackets(3, {(1, 2): {3: 1}}):
            return cls(algebra, [_unit(3, 0, 1), _unit(3, 1, 2), _unit(3, 0, 2)])
        if algebra == LieAlgebra.from_brackets(2, {(1, 2): {1: 1}}):
            return cls(algebra, [_unit(2, 0, 1), _unit(2, 1, 1)])
        raise RepresentationError("no built-in representation; supply generator matrices")


def _unit(size: int, p: int, q: int) -> list[list[int]]:
    m = [[0] * size for _ in range(size)]
    m[p][q] = 1
    return m


# curves --------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    position: object      # callable s -> (len(s), n) array
    velocity: object      # callable s -> (len(s), n) array
    start: float
    stop: float


class Curve:
    """A polyline through vertices, or a parametric curve in ``param``."""

    def __init__(self, chart: Chart, *, vertices=None, expressions=None, range_=None,
                 param: str = "t"):
        self.chart = chart
        self.param = param
        if (vertices is None) == (expressions is None):
            raise ValueError("give either vertices or parametric expressions")
        if vertices is not None:
            self.vertices = [[_fraction(x) for x in v]
                             for v in vertices]
            if len(self.vertices) < 2 or any(len(v) != chart.n for v in self.vertices):
                raise ValueError(f"polyline needs at least two {chart.n}-dimensional vertices")
            self.expressions = None
            self.range = (0.0, float(len(self.vertices) - 1))
        else:
            names = list(chart.names) + [param]
            self.expressions = tuple(simplify(parse(x, names) if isinstance(x, str) else x)
                                     for x in expressions)
            if len(self.expressions) != chart.n:
                raise ValueError(f"need {chart.n} parametric components")
            for e in self.expressions:
                extra = set(free_variables(e)) - {param}
                if extra:
                    raise ValueError(f"parametric components may only use {param!r}, found {sorted(extra)}")
            if range_ is None or len(range_) != 2:
                raise ValueError("parametric curve needs a range [a, b]")
            self.vertices = None
            self.range = (float(range_[0]), float(range_[1]))
            self._range_exact = tuple(_fraction(x) for x in range_)

    @classmethod
    def segment(cls, chart: Chart, start, end) -> "Curve":
        return cls(chart, vertices=[start, end])

    def endpoints(self) -> tuple[np.ndarray, np.ndarray]:
        if self.vertices is not None:
            return (np.array(self.vertices[0], dtype=float), np.array(self.vertices[-1], dtype=float))
        a, b = self.range
        fns = [compile_expr(e, [self.param]) for e in self.expressions]
        return np.array([f(a) for f in fns]), np.array([f(b) for f in fns])

    def inside(self, box: Sequence[tuple[float, float]]) -> bool:
        if self.vertices is None:
            s = np.linspace(*self.range, 257)
            pts = np.concatenate([seg.position(s) for seg in self.segments()])
        else:
            pts = np.array(self.vertices, dtype=float)
        lo = np.array([b[0] for b in box])
        hi = np.array([b[1] for b in box])
        return bool(np.all(pts >= lo) and np.all(pts <= hi))

    def segments(self) -> list[Segment]:
        if self.vertices is not None:
            out = []
            for a, b in zip(self.vertices, self.vertices[1:]):
                a_ = np.array(a, dtype=float)
                d = np.array(b, dtype=float) - a_
                out.append(Segment(lambda s, a_=a_, d=d: a_ + np.outer(s, d),
                                   lambda s, d=d: np.broadcast_to(d, (len(s), len(d))),
                                   0.0, 1.0))
            return out
        pos = [compile_expr(e, [self.param], vectorized=True) for e in self.expressions]
        vel = [compile_expr(differentiate(e, self.param), [self.param], vectorized=True)
               for e in self.expressions]

        def stack(fns, s):
            return np.stack([np.broadcast_to(f(s), s.shape) for f in fns], axis=1)

        return [Segment(lambda s: stack(pos, s), lambda s: stack(vel, s), *self.range)]

    def exact_line_integrals(self, omega: MaurerCartanForm) -> list[Fraction] | None:
        """Exact integrals of each omega^i along the curve when every
        integrand is a polynomial in the curve parameter, else None."""
        s = Var("_s")
        pieces = []
        if self.vertices is not None:
            for a, b in zip(self.vertices, self.vertices[1:]):
                coords = {n: Const(ai) + Const(bi - ai) * s for n, ai, bi in zip(self.chart.names, a, b)}
                vel = [Const(bi - ai) for ai, bi in zip(a, b)]
                pieces.append((coords, vel, Fraction(0), Fraction(1)))
        else:
            coords = {n: substitute(e, {self.param: s}) for n, e in zip(self.chart.names, self.expressions)}
            vel = [substitute(differentiate(e, self.param), {self.param: s}) for e in self.expressions]
            pieces.append((coords, vel, *self._range_exact))
        totals = []
        for row in omega.components:
            total = Fraction(0)
            for coords, vel, lo, hi in pieces:
                integrand = to_rat(sum((substitute(w, coords) * v for w, v in zip(row, vel)), Const(0)))
                value = _integrate_poly(integrand, lo, hi)
                if value is None:
                    return None
                total += value
            totals.append(total)
        return totals


def _integrate_poly(r: Rat, lo: Fraction, hi: Fraction) -> Fraction | None:
    if not r.is_poly:
        return None
    total = Fraction(0)
    for mono, c in r.num.items():
        exps = decode(mono)
        if len(exps) > 1 or any(not isinstance(_atoms[i], Var) for i, _ in exps):
            return None
        e = exps[0][1] if exps else 0
        total += c * (hi ** (e + 1) - lo ** (e + 1)) / (e + 1)
    return total


# development ---------------------------------------------------------------

@dataclass
class DevelopResult:
    matrix: np.ndarray
    steps: int
    vector: list[float] | None = None
    exact_vector: list[Fraction] | None = None


def _integrate_segment(omega: MaurerCartanForm, seg: Segment, gens: np.ndarray,
                       M: np.ndarray, step: float) -> tuple[np.ndarray, int]:
    length = seg.stop - seg.start
    if length == 0:
        return M, 0
    if not step > 0 or step < 1e-12 * abs(length):
        raise StepUnderflowError(f"step {step} too small for parameter length {length}")
    count = max(1, int(round(abs(length) / step)))
    h = length / count
    nodes = seg.start + h * np.arange(2 * count + 1) / 2.0
    pos = seg.position(nodes)
    vel = seg.velocity(nodes)
    coeffs = np.einsum("tij,tj->ti", omega.values(pos), vel)       # omega^i(gamma') at nodes
    A = np.einsum("ti,ipq->tpq", coeffs, gens)
    for k in range(count):
        a0, a1, a2 = A[2 * k], A[2 * k + 1], A[2 * k + 2]
        k1 = M @ a0
        k2 = (M + 0.5 * h * k1) @ a1
        k3 = (M + 0.5 * h * k2) @ a1
        k4 = (M + h * k3) @ a2
        M = M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return M, count


def develop(omega: MaurerCartanForm, curve: Curve, rep: GroupRepresentation | None = None,
            step: float | None = None) -> DevelopResult:
    """Integrate M' = M A(t), M(0) = I along ``curve`` with classical RK4.

    ``step`` defaults to 1e-3 of each segment's parameter length. For
    abelian targets the result also carries the translation vector and,
    for polynomial integrands, the exact line integrals.
    """
    if rep is None:
        rep = GroupRepresentation.builtin(omega.algebra)
    elif rep.algebra.c != omega.algebra.c:
        raise RepresentationError("representation is for a different algebra")
    M = np.eye(rep.size)
    total = 0
    for seg in curve.segments():
        h = step if step is not None else DEFAULT_STEP_FRACTION * abs(seg.stop - seg.start)
        M, count = _integrate_segment(omega, seg, rep.numeric, M, h)
        total += count
    result = DevelopResult(M, total)
    if not omega.algebra.nonzero_brackets() and rep.size == omega.algebra.dim + 1:
        result.vector = [float(x) for x in M[:-1, -1]]
        result.exact_vector = curve.exact_line_integrals(omega)
    return result


def path_independence_check(omega: MaurerCartanForm, curve1: Curve, curve2: Curve,
                            rep: GroupRepresentation | None = None, tol: float = PATH_TOL,
                            step: float | None = None) -> Verdict:
    a1, b1 = curve1.endpoints()
    a2, b2 = curve2.endpoints()
    if not (np.allclose(a1, a2, atol=1e-12) and np.allclose(b1, b2, atol=1e-12)):
        raise ValueError("curves must share their endpoints")
    m1 = develop(omega, curve1, rep, step).matrix
    m2 = develop(omega, curve2, rep, step).matrix
    diff = float(np.abs(m1 - m2).max())
    return Verdict(diff <= tol, Confidence.PROBABILISTIC if diff <= tol else Confidence.EXACT,
                   None if diff <= tol else {"discrepancy": diff},
                   f"max-norm discrepancy {diff:.3e}")


# deformation families ------------------------------------------------------

class DeformationFamily:
    """Structure constants depending on a parameter: ``{(i, j): {k: expr}}``
    with 1-based indices."""

    def __init__(self, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]],
                 param: str = "t"):
        self.dim = dim
        self.param = param
        self.brackets = {}
        for (i, j), coeffs in brackets.items():
            if i == j or not (1 <= i <= dim and 1 <= j <= dim):
                raise ValueError(f"invalid bracket indices ({i},{j})")
            self.brackets[(i, j)] = {k: simplify(parse(v, [param]) if isinstance(v, str) else v)
                                     for k, v in coeffs.items()}

    def at(self, t) -> LieAlgebra:
        value = _fraction(t)
        out = {}
        for key, coeffs in self.brackets.items():
            row = {}
            for k, e in coeffs.items():
                r = to_rat(substitute(e, {self.param: Const(value)}))
                if r.is_const():
                    row[k] = r.const_value()
                else:
                    row[k] = evaluate(from_rat(r), {})
            out[key] = row
        return LieAlgebra.from_brackets(self.dim, out)


@dataclass
class ScanRow:
    t: float
    jacobi: Verdict
    classification: ClassificationLabel | None


@dataclass
class DeformationScan:
    rows: list[ScanRow]
    transitions: list[tuple[float, float, str, str]] = field(default_factory=list)


def _label(row: ScanRow) -> str:
    if row.classification is None:
        return "not a Lie algebra"
    return row.classification.model


def deformation_scan(family: DeformationFamily, t_grid: Sequence[float], rng=None) -> DeformationScan:
    rows = []
    for t in t_grid:
        L = family.at(t)
        jac = jacobi_check(L)
        rows.append(ScanRow(float(t), jac, classify(L, rng) if jac else None))
    scan = DeformationScan(rows)
    for prev, cur in zip(rows, rows[1:]):
        if _label(prev) != _label(cur):
            scan.transitions.append((prev.t, cur.t, _label(prev), _label(cur)))
    return scan
