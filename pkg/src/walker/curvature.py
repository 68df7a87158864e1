"""Levi-Civita connection and curvature of a metric in coordinates.

Index conventions (0-based arrays):

* ``gamma[k][i][j]`` is Gamma^k_ij, so nabla_{d_i} d_j = sum_k Gamma^k_ij d_k.
* ``R[l][k][i][j]`` is R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik
  + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik.
* ``Ric[i][j]`` = sum_k R^k_ikj.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import InconsistencyError
from .metric import Chart, InverseMetric, MetricTensor, invert
from .symexpr import Expr, Rat, from_rat, is_zero
from .verdict import Verdict

_HALF = Fraction(1, 2)
_ZERO = Rat.const(0)


def _sum(terms) -> Rat:
    acc = _ZERO
    for t in terms:
        if t.num:
            acc = acc + t
    return acc


def _mul(a: Rat, b: Rat) -> Rat:
    return a * b if a.num and b.num else _ZERO


class _Tensor:
    """Nested lists of ``Rat`` with an ``Expr`` view."""

    rank = 0

    def __init__(self, chart: Chart, data):
        self.chart = chart
        self.data = data

    @property
    def n(self) -> int:
        return self.chart.n

    def rat(self, *idx) -> Rat:
        out = self.data
        for i in idx:
            out = out[i]
        return out

    def __getitem__(self, idx) -> Expr:
        if not isinstance(idx, tuple):
            idx = (idx,)
        return from_rat(self.rat(*idx))

    def entries(self):
        """Yield ``(index_tuple, Rat)`` for every component."""
        def walk(node, prefix):
            if isinstance(node, Rat):
                yield prefix, node
            else:
                for i, child in enumerate(node):
                    yield from walk(child, prefix + (i,))
        yield from walk(self.data, ())

    def nonzero(self) -> dict[tuple[int, ...], Expr]:
        return {idx: from_rat(r) for idx, r in self.entries() if r.num}

    def is_zero(self, rng=None) -> Verdict:
        verdicts = []
        for idx, r in self.entries():
            v = is_zero(r, rng)
            if not v:
                return Verdict(False, v.confidence, v.witness,
                               f"component {tuple(i + 1 for i in idx)} is nonzero")
            verdicts.append(v)
        return Verdict.all_of(verdicts, "all components vanish")


class ConnectionCoefficients(_Tensor):
    rank = 3

    def covariant_derivative(self, i: int, components) -> list[Rat]:
        """Components of nabla_{d_i} X for X given by Rat components."""
        n = self.n
        out = []
        for k in range(n):
            terms = [components[k].diff(self.chart.names[i])]
            terms += [_mul(self.data[k][i][j], components[j]) for j in range(n)]
            out.append(_sum(terms))
        return out


class RiemannTensor(_Tensor):
    rank = 4


class RicciTensor(_Tensor):
    rank = 2


@dataclass(frozen=True)
class InvariantsReport:
    scal: Expr
    ric_squared: Expr
    kretschmann: Expr


def christoffel(g: MetricTensor, g_inv: InverseMetric | None = None) -> ConnectionCoefficients:
    g_inv = g_inv or invert(g)
    n = g.n
    names = g.chart.names
    dg = [[[g.rat[i][j].diff(names[l]) for j in range(n)] for i in range(n)] for l in range(n)]
    gamma = [[[_ZERO] * n for _ in range(n)] for _ in range(n)]
    # first kind: [ij, l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
    first = [[[_ZERO] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            for l in range(n):
                v = _sum([dg[i][j][l], dg[j][i][l], -dg[l][i][j]])
                first[i][j][l] = first[j][i][l] = v.scale(_HALF) if v.num else _ZERO
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                v = _sum(_mul(g_inv.rat[k][l], first[i][j][l]) for l in range(n))
                gamma[k][i][j] = gamma[k][j][i] = v
    return ConnectionCoefficients(g.chart, gamma)


def riemann(gamma: ConnectionCoefficients) -> RiemannTensor:
    n = gamma.n
    names = gamma.chart.names
    G = gamma.data
    dG = {}

    def d(i, l, j, k):
        key = (i, l, j, k)
        if key not in dG:
            dG[key] = G[l][j][k].diff(names[i])
        return dG[key]

    R = [[[[_ZERO] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    terms = [d(i, l, j, k), -d(j, l, i, k)]
                    for m in range(n):
                        terms.append(_mul(G[l][i][m], G[m][j][k]))
                        terms.append(-_mul(G[l][j][m], G[m][i][k]))
                    R[l][k][i][j] = _sum(terms)
    return RiemannTensor(gamma.chart, R)


def ricci(R: RiemannTensor, rng=None) -> RicciTensor:
    """Contraction Ric_ij = sum_k R^k_ikj; raises InconsistencyError when
    the result is not symmetric."""
    n = R.n
    data = [[_sum(R.data[k][i][k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = is_zero(data[i][j] - data[j][i], rng)
            if not v:
                raise InconsistencyError(f"Ricci tensor not symmetric at ({i + 1},{j + 1})")
    return RicciTensor(R.chart, data)


def ricci_from_connection(gamma: ConnectionCoefficients) -> RicciTensor:
    """Ricci tensor directly from the connection, skipping the full
    Riemann tensor: Ric_ij = d_k G^k_ji - d_j G^k_ki + G^k_km G^m_ji - G^k_jm G^m_ki."""
    n = gamma.n
    names = gamma.chart.names
    G = gamma.data
    trace = [_sum(G[k][k][m] for k in range(n)) for m in range(n)]
    data = [[_ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            terms = [G[k][j][i].diff(names[k]) for k in range(n)]
            terms.append(-trace[i].diff(names[j]))
            terms += [_mul(trace[m], G[m][j][i]) for m in range(n)]
            terms += [-_mul(G[k][j][m], G[m][k][i]) for k in range(n) for m in range(n)]
            data[i][j] = data[j][i] = _sum(terms)
    return RicciTensor(gamma.chart, data)


def scalar(ric: RicciTensor, g_inv: InverseMetric) -> Expr:
    n = ric.n
    return from_rat(_sum(_mul(g_inv.rat[i][j], ric.data[i][j]) for i in range(n) for j in range(n)))


def _raise_all(t: list, g_inv: InverseMetric, n: int, order: int):
    """Raise every index of a fully covariant tensor stored as nested lists."""
    flat = {idx: _get(t, idx) for idx in itertools.product(range(n), repeat=order)}
    for slot in range(order):
        new = {}
        for idx in flat:
            acc = []
            for m in range(n):
                gm = g_inv.rat[idx[slot]][m]
                if gm.num:
                    src = idx[:slot] + (m,) + idx[slot + 1:]
                    acc.append(_mul(gm, flat[src]))
            new[idx] = _sum(acc)
        flat = new
    return flat


def _get(t, idx):
    for i in idx:
        t = t[i]
    return t


def invariants(g: MetricTensor, g_inv: InverseMetric | None = None,
               R: RiemannTensor | None = None, ric: RicciTensor | None = None) -> InvariantsReport:
    """scal, Ric_ij Ric^ij and R_ijkl R^ijkl."""
    g_inv = g_inv or invert(g)
    n = g.n
    R = R or riemann(christoffel(g, g_inv))
    ric = ric or ricci(R)
    scal = scalar(ric, g_inv)

    ric_up = _raise_all(ric.data, g_inv, n, 2)
    ric_sq = _sum(_mul(ric.data[i][j], ric_up[(i, j)]) for i in range(n) for j in range(n))

    lowered = [[[[_sum(_mul(g.rat[m][l], R.data[l][k][i][j]) for l in range(n))
                  for j in range(n)] for i in range(n)] for k in range(n)] for m in range(n)]
    up = _raise_all(lowered, g_inv, n, 4)
    kretsch = _sum(_mul(_get(lowered, idx), up[idx])
                   for idx in itertools.product(range(n), repeat=4))
    return InvariantsReport(scal, from_rat(ric_sq), from_rat(kretsch))


def ricci_kernel_check(g: MetricTensor, D, rng=None, ric: RicciTensor | None = None) -> Verdict:
    """Whether every spanning field X of ``D`` satisfies Ric(X, .) = 0."""
    if ric is None:
        ric = ricci_from_connection(christoffel(g))
    n = g.n
    verdicts = []
    for a, X in enumerate(D.fields):
        comps = X.rat
        for j in range(n):
            value = _sum(_mul(comps[i], ric.data[i][j]) for i in range(n))
            v = is_zero(value, rng)
            if not v:
                return Verdict(False, v.confidence, v.witness,
                               f"Ric(X{a + 1}, d_{g.chart.names[j]}) = {from_rat(value)}")
            verdicts.append(v)
    return Verdict.all_of(verdicts, "distribution lies in the Ricci kernel")


class Geometry:
    """Lazily computed curvature data of one metric."""

    def __init__(self, g: MetricTensor, rng=None):
        self.g = g
        self.rng = rng

    @cached_property
    def inverse(self) -> InverseMetric:
        return invert(self.g)

    @cached_property
    def connection(self) -> ConnectionCoefficients:
        return christoffel(self.g, self.inverse)

    @cached_property
    def riemann(self) -> RiemannTensor:
        return riemann(self.connection)

    @cached_property
    def ricci(self) -> RicciTensor:
        return ricci(self.riemann, self.rng)

    @cached_property
    def scalar(self) -> Expr:
        return scalar(self.ricci, self.inverse)

    @cached_property
    def invariants(self) -> InvariantsReport:
        return invariants(self.g, self.inverse, self.riemann, self.ricci)
