"""Charts, Walker canonical metrics and their inverses."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import symmatrix
from .errors import InconsistencyError, SingularMetricError, SpecError, UnboundVariableError
from .symexpr import (ONE, ZERO, Const, Expr, as_expr, compile_expr, differentiate, evaluate,
                      free_variables, from_rat, is_zero, parse, simplify, to_rat)
from .verdict import Verdict


@dataclass(frozen=True)
class Chart:
    """Ordered coordinate names of a local chart."""

    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) < 2:
            raise ValueError("a chart needs at least two coordinates")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate coordinate names in {self.names}")

    @classmethod
    def standard(cls, n: int, prefix: str = "x") -> "Chart":
        return cls(tuple(f"{prefix}{i}" for i in range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.names)

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def bind(self, e) -> Expr:
        """Parse strings, then check every free variable is a coordinate
        and return the simplified expression."""
        e = parse(e, self) if isinstance(e, str) else as_expr(e)
        for name in free_variables(e):
            if name not in self.names:
                raise UnboundVariableError(name, self.names)
        return simplify(e)

    def point(self, values) -> dict[str, float]:
        return dict(zip(self.names, (float(v) for v in values)))


def _matrix_exprs(rows) -> tuple[tuple[Expr, ...], ...]:
    return tuple(tuple(simplify(x) for x in row) for row in rows)


class _SymmetricMatrix:
    def __init__(self, chart: Chart, rows):
        self.chart = chart
        self.matrix = _matrix_exprs(rows)
        n = chart.n
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise ValueError(f"expected a {n}x{n} matrix")

    @property
    def n(self) -> int:
        return self.chart.n

    def __getitem__(self, ij) -> Expr:
        i, j = ij
        return self.matrix[i][j]

    @cached_property
    def rat(self) -> symmatrix.RatMatrix:
        return [[to_rat(x) for x in row] for row in self.matrix]

    @cached_property
    def _compiled(self):
        return [[compile_expr(x, self.chart.names) for x in row] for row in self.matrix]

    def at(self, point) -> np.ndarray:
        """Numeric matrix at a point given as a sequence or a name mapping."""
        if isinstance(point, dict):
            point = [point[n] for n in self.chart.names]
        return np.array([[fn(*point) for fn in row] for row in self._compiled], dtype=float)

    def rows_as_text(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.matrix]


class MetricTensor(_SymmetricMatrix):
    """Symmetric matrix g_ij of a pseudo-Riemannian metric with a declared
    signature ``(p, q)`` = (#negative, #positive)."""

    def __init__(self, chart: Chart, rows, signature: tuple[int, int] | None = None,
                 spec: "WalkerSpec | None" = None):
        super().__init__(chart, rows)
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValueError(f"metric is not symmetric at ({i + 1},{j + 1})")
        self.signature = signature
        self.spec = spec
        if self.determinant_rat.is_zero():
            raise SingularMetricError("metric determinant vanishes identically")

    @cached_property
    def determinant_rat(self):
        return symmatrix.det(self.rat)

    @property
    def determinant(self) -> Expr:
        return from_rat(self.determinant_rat)

    def inner(self, u, v):
        """g(u, v) for component sequences of Rat values."""
        acc = to_rat(ZERO)
        for i, ui in enumerate(u):
            if not ui.num:
                continue
            for j, vj in enumerate(v):
                gij = self.rat[i][j]
                if vj.num and gij.num:
                    acc = acc + ui * gij * vj
        return acc

    def __repr__(self):
        return f"MetricTensor({self.chart.names}, signature={self.signature})"


class InverseMetric(_SymmetricMatrix):
    """Symmetric matrix g^ij."""

    def __repr__(self):
        return f"InverseMetric({self.chart.names})"


# Walker specifications -----------------------------------------------------

@dataclass(frozen=True)
class WalkerSpec:
    """Input data of a Walker canonical form.

    ``kind`` is ``"dim3"``, ``"dim4"`` or ``"general"``. Block entries are
    simplified expressions bound to ``chart``. The coordinate order is
    ``(x^1..x^r, z^1..z^(n-2r), y^1..y^r)``: the distribution comes first
    and the coordinates paired with it come last, which is the order used by
    the three- and four-dimensional forms.
    """

    kind: str
    rank: int
    chart: Chart
    h: tuple[tuple[Expr, ...], ...] = ()
    a: tuple[tuple[Expr, ...], ...] = ()
    b: tuple[tuple[Expr, ...], ...] = ()
    epsilon: int | None = None
    components: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.chart.n

    @property
    def distribution_indices(self) -> list[int]:
        return list(range(self.rank))

    @property
    def transverse_indices(self) -> list[int]:
        return list(range(self.rank, self.n - self.rank))

    @property
    def dual_indices(self) -> list[int]:
        return list(range(self.n - self.rank, self.n))


def _bind_block(chart: Chart, rows, shape, name) -> tuple[tuple[Expr, ...], ...]:
    rows = [list(r) for r in rows]
    if len(rows) != shape[0] or any(len(r) != shape[1] for r in rows):
        raise SpecError(f"block {name} must be {shape[0]}x{shape[1]}")
    return tuple(tuple(chart.bind(x) for x in r) for r in rows)


def _check_symmetric(block, name):
    for i, row in enumerate(block):
        for j in range(i + 1, len(row)):
            if block[i][j] != block[j][i]:
                raise SpecError(f"block {name} is not symmetric at ({i + 1},{j + 1})")


def _inertia(block, chart: Chart) -> tuple[int, int]:
    if not block:
        return (0, 0)
    point = {n: 1.0 for n in chart.names}
    vals = np.linalg.eigvalsh(np.array([[evaluate(x, point) for x in row] for row in block]))
    return int((vals < 0).sum()), int((vals > 0).sum())


def build_walker3(f, epsilon: int = 1, chart: Chart | None = None) -> MetricTensor:
    """g_f = 2 dx1.dx3 + eps dx2^2 + f dx3^2."""
    chart = chart or Chart.standard(3)
    if chart.n != 3:
        raise SpecError("the three-dimensional form needs a 3-coordinate chart")
    if epsilon not in (1, -1):
        raise SpecError("epsilon must be +1 or -1")
    f = chart.bind(f)
    eps = Const(epsilon)
    rows = [[ZERO, ZERO, ONE], [ZERO, eps, ZERO], [ONE, ZERO, f]]
    spec = WalkerSpec("dim3", 1, chart, h=((eps,),), a=((ZERO,),), b=((f,),),
                      epsilon=epsilon, components={"f": f})
    signature = (1, 2) if epsilon == 1 else (2, 1)
    return MetricTensor(chart, rows, signature, spec)


def build_walker4(a, b, c, chart: Chart | None = None) -> MetricTensor:
    """g_{a,b,c} = 2(dx1.dx3 + dx2.dx4) + a dx3^2 + b dx4^2 + 2c dx3.dx4."""
    chart = chart or Chart.standard(4)
    if chart.n != 4:
        raise SpecError("the four-dimensional form needs a 4-coordinate chart")
    a, b, c = chart.bind(a), chart.bind(b), chart.bind(c)
    rows = [[ZERO, ZERO, ONE, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [ONE, ZERO, a, c],
            [ZERO, ONE, c, b]]
    spec = WalkerSpec("dim4", 2, chart, b=((a, c), (c, b)), components={"a": a, "b": b, "c": c})
    return MetricTensor(chart, rows, (2, 2), spec)


def build_walker_general(r: int, h, a, b, chart: Chart | None = None,
                         signature: tuple[int, int] | None = None) -> MetricTensor:
    """General canonical form of rank ``r``.

    ``h`` is the (n-2r)x(n-2r) block on the z coordinates, ``a`` the r x (n-2r)
    cross block (``a[i][k] dy^i.dz^k``) and ``b`` the r x r block on the y
    coordinates paired with the distribution. Without an explicit
    ``signature`` it is read off numerically from ``h`` at the all-ones point.
    """
    h = [list(row) for row in h]
    m = len(h)
    n = m + 2 * r
    if r < 1:
        raise SpecError("rank must be positive")
    chart = chart or Chart.standard(n)
    if chart.n != n:
        raise SpecError(f"chart has {chart.n} coordinates, blocks describe {n}")
    hb = _bind_block(chart, h, (m, m), "h")
    ab = _bind_block(chart, a if m else [[] for _ in range(r)], (r, m), "a")
    bb = _bind_block(chart, b, (r, r), "b")
    _check_symmetric(hb, "h")
    _check_symmetric(bb, "b")
    if m and symmatrix.det([[to_rat(x) for x in row] for row in hb]).is_zero():
        raise SingularMetricError("h block is degenerate")

    xs = list(range(r))
    zs = list(range(r, r + m))
    ys = list(range(r + m, n))
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(r):
        rows[xs[i]][ys[i]] = rows[ys[i]][xs[i]] = ONE
        for j in range(r):
            rows[ys[i]][ys[j]] = bb[i][j]
        for k in range(m):
            half = simplify(ab[i][k] / 2)
            rows[ys[i]][zs[k]] = rows[zs[k]][ys[i]] = half
    for k in range(m):
        for l in range(m):
            rows[zs[k]][zs[l]] = hb[k][l]
    if signature is None:
        p, q = _inertia(hb, chart)
        signature = (r + p, r + q)
    eps = None
    if n == 3 and r == 1 and hb[0][0] in (Const(1), Const(-1)):
        eps = int(hb[0][0].value)
    spec = WalkerSpec("general", r, chart, h=hb, a=ab, b=bb, epsilon=eps)
    return MetricTensor(chart, rows, signature, spec)


def invert(g: MetricTensor) -> InverseMetric:
    """Symbolic inverse by adjugate over determinant, checked against
    ``g . g^-1 = I`` exactly."""
    try:
        inv, _ = symmatrix.adjugate_inverse(g.rat)
    except ZeroDivisionError:
        raise SingularMetricError("metric determinant vanishes identically") from None
    prod = symmatrix.matmul(g.rat, inv)
    n = g.n
    for i in range(n):
        for j in range(n):
            residual = prod[i][j] - to_rat(ONE if i == j else ZERO)
            if not residual.is_zero():
                raise InconsistencyError(f"g.g^-1 differs from I at ({i + 1},{j + 1})")
    out = InverseMetric(g.chart, [[from_rat(x) for x in row] for row in inv])
    out.__dict__["rat"] = inv
    return out


def is_strict(spec: WalkerSpec | MetricTensor, rng=None) -> Verdict:
    """Whether the b block is independent of the distribution coordinates."""
    if isinstance(spec, MetricTensor):
        if spec.spec is None:
            raise ValueError("metric was not built from a Walker specification")
        spec = spec.spec
    verdicts = []
    for i, row in enumerate(spec.b):
        for j, entry in enumerate(row):
            for k in spec.distribution_indices:
                name = spec.chart.names[k]
                v = is_zero(differentiate(entry, name), rng)
                if not v:
                    return Verdict(False, v.confidence, v.witness,
                                   f"b[{i + 1}][{j + 1}] depends on {name}")
                verdicts.append(v)
    return Verdict.all_of(verdicts, "b block independent of the distribution coordinates")
