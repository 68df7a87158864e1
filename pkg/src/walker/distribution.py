"""Vector fields and distributions on a chart.

Span membership is exact when the spanning fields have constant
components; otherwise it is decided pointwise at sampled points.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from . import exact, symmatrix
from .curvature import ConnectionCoefficients, christoffel
from .errors import DomainError, NotParallelError, RankError
from .metric import Chart, MetricTensor
from .symexpr import DEFAULT_SEED, Expr, Rat, Var, evaluate, from_rat, is_zero, to_rat
from .verdict import Confidence, Verdict

SAMPLE_POINTS = 16
MEMBERSHIP_TOL = 1e-9
RANK_TOL = 1e-9

_ZERO = Rat.const(0)


def sample_points(chart: Chart, rng=None, count: int = SAMPLE_POINTS) -> list[dict[str, float]]:
    """The origin, the all-ones point, then uniform points in [-2, 2]^n."""
    rng = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    pts = [dict.fromkeys(chart.names, 0.0), dict.fromkeys(chart.names, 1.0)]
    while len(pts) < count:
        pts.append(chart.point(rng.uniform(-2.0, 2.0, chart.n)))
    return pts[:count]


class VectorField:
    """Components X^i (one expression per coordinate) of a vector field."""

    def __init__(self, chart: Chart, components: Sequence):
        if len(components) != chart.n:
            raise ValueError(f"expected {chart.n} components, got {len(components)}")
        self.chart = chart
        self.components = tuple(chart.bind(c) for c in components)

    @classmethod
    def coordinate(cls, chart: Chart, index: int, scale=1) -> "VectorField":
        """``scale`` times the coordinate field of the ``index``-th (0-based) coordinate."""
        comps = [0] * chart.n
        comps[index] = scale
        return cls(chart, comps)

    @classmethod
    def from_rat(cls, chart: Chart, comps: Sequence[Rat]) -> "VectorField":
        out = cls.__new__(cls)
        out.chart = chart
        out.components = tuple(from_rat(c) for c in comps)
        out.__dict__["rat"] = list(comps)
        return out

    @cached_property
    def rat(self) -> list[Rat]:
        return [to_rat(c) for c in self.components]

    @cached_property
    def constant_components(self) -> list[Fraction] | None:
        if all(c.is_const() for c in self.rat):
            return [c.const_value() for c in self.rat]
        return None

    def at(self, point: dict[str, float]) -> np.ndarray:
        return np.array([evaluate(c, point) for c in self.components], dtype=float)

    def apply(self, f: Rat) -> Rat:
        """Directional derivative X(f)."""
        acc = _ZERO
        for name, xi in zip(self.chart.names, self.rat):
            if xi.num:
                df = f.diff(name)
                if df.num:
                    acc = acc + xi * df
        return acc

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.chart == other.chart \
            and self.components == other.components

    def __hash__(self):
        return hash((self.chart, self.components))

    def __str__(self):
        parts = []
        for name, c in zip(self.chart.names, self.components):
            text = str(c)
            if text == "0":
                continue
            parts.append(f"d_{name}" if text == "1" else f"({text})*d_{name}")
        return " + ".join(parts) or "0"

    def __repr__(self):
        return f"VectorField({self})"


def bracket(X: VectorField, Y: VectorField) -> VectorField:
    """Lie bracket [X, Y]^k = X(Y^k) - Y(X^k)."""
    comps = [X.apply(yk) - Y.apply(xk) for xk, yk in zip(X.rat, Y.rat)]
    return VectorField.from_rat(X.chart, comps)


class Distribution:
    """Span of vector fields with a declared constant rank.

    The constructor checks the pointwise rank of the spanning set at the
    sample points and raises :class:`RankError` with the first point where
    it differs from ``rank``. ``walker_candidate`` additionally enforces
    ``rank <= n/2``.
    """

    def __init__(self, chart: Chart, fields: Sequence[VectorField], rank: int | None = None,
                 *, check_rank: bool = True, walker_candidate: bool = False, rng=None):
        self.chart = chart
        self.fields = list(fields)
        self.rank = len(self.fields) if rank is None else rank
        if any(f.chart != chart for f in self.fields):
            raise ValueError("all fields must live on the distribution's chart")
        if walker_candidate and 2 * self.rank > chart.n:
            raise RankError(f"rank {self.rank} exceeds half the dimension {chart.n}")
        if check_rank:
            self._check_rank(rng)

    @classmethod
    def coordinate(cls, chart: Chart, indices: Sequence[int], **kw) -> "Distribution":
        return cls(chart, [VectorField.coordinate(chart, i) for i in indices], **kw)

    def _check_rank(self, rng):
        for point in sample_points(self.chart, rng):
            try:
                m = np.array([f.at(point) for f in self.fields]) if self.fields else np.zeros((0, self.chart.n))
            except DomainError:
                continue
            r = exact.numeric_rank(m, RANK_TOL) if self.fields else 0
            if r != self.rank:
                raise RankError(f"spanning set has rank {r}, expected {self.rank}",
                                {k: round(v, 12) for k, v in point.items()})

    @property
    def n(self) -> int:
        return self.chart.n

    @cached_property
    def constant_matrix(self) -> list[list[Fraction]] | None:
        rows = [f.constant_components for f in self.fields]
        return None if any(r is None for r in rows) else rows

    @cached_property
    def coordinate_indices(self) -> list[int] | None:
        """Indices of the coordinate fields spanning D, when D is spanned by
        constant multiples of coordinate fields."""
        rows = self.constant_matrix
        if rows is None:
            return None
        out = []
        for row in rows:
            nz = [i for i, c in enumerate(row) if c]
            if len(nz) != 1:
                return None
            out.append(nz[0])
        return sorted(set(out))

    def contains(self, V: VectorField | Sequence[Rat], rng=None) -> Verdict:
        comps = V.rat if isinstance(V, VectorField) else list(V)
        return in_span(comps, self, rng)

    def __repr__(self):
        return f"Distribution(rank={self.rank}, fields=[{', '.join(map(str, self.fields))}])"


def in_span(comps: Sequence[Rat], D: Distribution, rng=None) -> Verdict:
    """Whether the field with components ``comps`` lies in D pointwise."""
    rows = D.constant_matrix
    if rows is not None:
        # V in the row space of the constant matrix iff every vector of its
        # orthogonal complement annihilates V
        conditions = exact.nullspace(rows, D.n) if rows else \
            [[Fraction(int(i == j)) for i in range(D.n)] for j in range(D.n)]
        verdicts = []
        for y in conditions:
            value = _ZERO
            for yi, vi in zip(y, comps):
                if yi and vi.num:
                    value = value + vi.scale(yi)
            v = is_zero(value, rng)
            if not v:
                return Verdict(False, v.confidence, v.witness, "field leaves the span")
            verdicts.append(v)
        return Verdict.all_of(verdicts)

    V = VectorField.from_rat(D.chart, comps)
    checked = 0
    for point in sample_points(D.chart, rng):
        try:
            A = np.array([f.at(point) for f in D.fields]).T
            b = V.at(point)
        except DomainError:
            continue
        coef, *_ = np.linalg.lstsq(A, b, rcond=None)
        residual = float(np.abs(A @ coef - b).max())
        checked += 1
        if residual > MEMBERSHIP_TOL * max(1.0, float(np.abs(b).max())):
            return Verdict(False, Confidence.PROBABILISTIC, point,
                           f"residual {residual:.3e} outside the span")
    if checked == 0:
        raise DomainError("no admissible sample point for the membership test")
    return Verdict(True, Confidence.PROBABILISTIC, None, f"in span at {checked} sampled points")


def is_totally_isotropic(D: Distribution, g: MetricTensor, rng=None) -> Verdict:
    verdicts = []
    for a, X in enumerate(D.fields):
        for b in range(a, len(D.fields)):
            value = g.inner(X.rat, D.fields[b].rat)
            v = is_zero(value, rng)
            if not v:
                return Verdict(False, v.confidence, v.witness,
                               f"g(X{a + 1}, X{b + 1}) = {from_rat(value)}")
            verdicts.append(v)
    return Verdict.all_of(verdicts, "totally isotropic")


def is_involutive(D: Distribution, rng=None) -> Verdict:
    verdicts = []
    for a, X in enumerate(D.fields):
        for b in range(a + 1, len(D.fields)):
            v = in_span(bracket(X, D.fields[b]).rat, D, rng)
            if not v:
                return Verdict(False, v.confidence, v.witness,
                               f"[X{a + 1}, X{b + 1}] leaves the distribution")
            verdicts.append(v)
    return Verdict.all_of(verdicts, "closed under brackets")


def _connection(g: MetricTensor, connection) -> ConnectionCoefficients:
    return connection if connection is not None else christoffel(g)


def is_parallel(D: Distribution, g: MetricTensor, rng=None,
                connection: ConnectionCoefficients | None = None) -> Verdict:
    """Whether nabla_{d_i} X stays in D for every coordinate i and spanning X."""
    gamma = _connection(g, connection)
    verdicts = []
    for a, X in enumerate(D.fields):
        for i, name in enumerate(g.chart.names):
            v = in_span(gamma.covariant_derivative(i, X.rat), D, rng)
            if not v:
                return Verdict(False, v.confidence, v.witness,
                               f"nabla_(d_{name}) X{a + 1} leaves the distribution")
            verdicts.append(v)
    return Verdict.all_of(verdicts, "parallel")


def is_parallel_frame(fields: Sequence[VectorField], g: MetricTensor, rng=None,
                      connection: ConnectionCoefficients | None = None) -> Verdict:
    """Whether every field is parallel: nabla_{d_i} X = 0 componentwise."""
    gamma = _connection(g, connection)
    verdicts = []
    for a, X in enumerate(fields):
        for i, name in enumerate(g.chart.names):
            for k, comp in enumerate(gamma.covariant_derivative(i, X.rat)):
                v = is_zero(comp, rng)
                if not v:
                    return Verdict(False, v.confidence, v.witness,
                                   f"component {k + 1} of nabla_(d_{name}) X{a + 1} = {from_rat(comp)}")
                verdicts.append(v)
    return Verdict.all_of(verdicts, "parallel frame")


def _symbolic_nullspace(rows: list[list[Rat]], n: int) -> list[list[Rat]]:
    """Nullspace over the field of rational functions by Gauss-Jordan,
    preferring constant pivots."""
    a = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        candidates = [i for i in range(r, len(a)) if a[i][col].num]
        if not candidates:
            continue
        const = [i for i in candidates if a[i][col].is_const()]
        p = (const or candidates)[0]
        a[r], a[p] = a[p], a[r]
        inv = a[r][col].inverse()
        a[r] = [x * inv if x.num else x for x in a[r]]
        for i in range(len(a)):
            f = a[i][col]
            if i != r and f.num:
                a[i] = [x - f * y if y.num else x for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    basis = []
    for free in (j for j in range(n) if j not in pivots):
        v = [_ZERO] * n
        v[free] = Rat.const(1)
        for i, p in enumerate(pivots):
            v[p] = -a[i][free]
        basis.append(v)
    return basis


def orthogonal_complement(D: Distribution, g: MetricTensor, rng=None) -> Distribution:
    """D^perp = {V : g(V, X) = 0 for every X in D}, spanned symbolically."""
    n = g.n
    rows = []
    for X in D.fields:
        rows.append([_sum_row(X.rat, g.rat, j) for j in range(n)])
    for point in sample_points(g.chart, rng):
        try:
            m = np.array([[evaluate(from_rat(x), point) for x in row] for row in rows])
        except DomainError:
            continue
        if rows and exact.numeric_rank(m, RANK_TOL) != D.rank:
            raise RankError("orthogonality conditions drop rank", point)
    basis = _symbolic_nullspace(rows, n) if rows else [
        [Rat.const(int(i == j)) for i in range(n)] for j in range(n)]
    fields = [VectorField.from_rat(g.chart, v) for v in basis]
    return Distribution(g.chart, fields, n - D.rank, rng=rng)


def _sum_row(x: list[Rat], g: symmatrix.RatMatrix, j: int) -> Rat:
    acc = _ZERO
    for i, xi in enumerate(x):
        if xi.num and g[i][j].num:
            acc = acc + xi * g[i][j]
    return acc


# transverse connection -----------------------------------------------------

@dataclass(frozen=True)
class TransverseConnection:
    """Connection induced on TM/D, in the frame (D fields, complement).

    ``coefficients[a][b][c]`` is the c-th complement component of
    nabla_{E_a} Y_b modulo D, where E runs over the full frame (D fields first)
    and Y over the complement.
    """

    distribution: Distribution
    complement: tuple[VectorField, ...]
    coefficients: tuple[tuple[tuple[Expr, ...], ...], ...]
    lift_check: Verdict

    def nonzero(self) -> dict[tuple[int, int, int], Expr]:
        out = {}
        for a, block in enumerate(self.coefficients):
            for b, row in enumerate(block):
                for c, x in enumerate(row):
                    if str(x) != "0":
                        out[(a, b, c)] = x
        return out


def _covariant(gamma: ConnectionCoefficients, X: list[Rat], Y: list[Rat]) -> list[Rat]:
    """nabla_X Y for arbitrary fields."""
    n = gamma.n
    out = [_ZERO] * n
    for i, xi in enumerate(X):
        if not xi.num:
            continue
        dY = gamma.covariant_derivative(i, Y)
        out = [o + xi * d if d.num else o for o, d in zip(out, dY)]
    return out


def _transverse_coefficients(gamma, D: Distribution, complement) -> list:
    chart = D.chart
    n = chart.n
    frame = [f.rat for f in D.fields] + [f.rat for f in complement]
    F = [[frame[c][i] for c in range(n)] for i in range(n)]  # columns are frame fields
    try:
        Finv, _ = symmatrix.adjugate_inverse(F)
    except ZeroDivisionError:
        raise RankError("distribution and complement do not span the tangent space") from None
    r = D.rank
    out = []
    for E in frame:
        block = []
        for Y in complement:
            W = _covariant(gamma, E, Y.rat)
            coords = [sum((Finv[c][i] * W[i] for i in range(n) if W[i].num and Finv[c][i].num), _ZERO)
                      for c in range(r, n)]
            block.append(coords)
        out.append(block)
    return out


def transverse_connection(g: MetricTensor, D: Distribution, complement: Sequence[VectorField] | None = None,
                          rng=None, connection: ConnectionCoefficients | None = None) -> TransverseConnection:
    """nabla^T_X Ybar := (nabla_X Y) mod D, with a lift-shift well-definedness check.

    The default complement is the coordinate fields outside D when D is
    coordinate-spanned. Raises :class:`NotParallelError` when D is not parallel.
    """
    gamma = _connection(g, connection)
    verdict = is_parallel(D, g, rng, gamma)
    if not verdict:
        raise NotParallelError(f"distribution is not parallel: {verdict.detail}")
    if complement is None:
        idx = D.coordinate_indices
        if idx is None:
            raise ValueError("a complement is required for a non-coordinate distribution")
        complement = [VectorField.coordinate(g.chart, i) for i in range(g.n) if i not in idx]
    complement = list(complement)
    if len(complement) != g.n - D.rank:
        raise RankError("complement must complete D to a frame")
    coeffs = _transverse_coefficients(gamma, D, complement)

    # shift each lift by a non-constant multiple of each D field
    shift = sum((to_rat(Var(name)) for name in g.chart.names), Rat.const(1))
    checks = []
    for b in range(len(complement)):
        for Z in D.fields:
            shifted = list(complement)
            comps = [y + shift * z if z.num else y for y, z in zip(complement[b].rat, Z.rat)]
            shifted[b] = VectorField.from_rat(g.chart, comps)
            again = _transverse_coefficients(gamma, D, shifted)
            for a in range(g.n):
                for bb in range(len(complement)):
                    for c in range(len(complement)):
                        checks.append(is_zero(again[a][bb][c] - coeffs[a][bb][c], rng))
    lift = Verdict.all_of(checks, "independent of the choice of lift")
    exprs = tuple(tuple(tuple(from_rat(x) for x in row) for row in block) for block in coeffs)
    return TransverseConnection(D, tuple(complement), exprs, lift)
