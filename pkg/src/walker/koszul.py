"""Levi-Civita connections of left-invariant metrics, computed in the
invariant frame from the Koszul formula

    2 g(nabla_U V, W) = g([U,V], W) - g([V,W], U) + g([W,U], V).
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact
from .errors import InconsistencyError, SingularMetricError
from .liealg import ClassificationLabel, LieAlgebra, classify
from .verdict import Confidence, Verdict


class InvariantMetric:
    """Symmetric non-degenerate matrix g(e_i, e_j)."""

    def __init__(self, algebra: LieAlgebra, matrix):
        r = algebra.dim
        exact_input = all(not isinstance(x, float) for row in matrix for x in row)
        m = exact.to_fractions(matrix) if exact_input else [[float(x) for x in row] for row in matrix]
        if len(m) != r or any(len(row) != r for row in m):
            raise ValueError(f"metric must be {r}x{r}")
        for i in range(r):
            for j in range(i + 1, r):
                if m[i][j] != m[j][i]:
                    raise ValueError(f"metric not symmetric at ({i + 1},{j + 1})")
        d = exact.det(m) if exact_input else float(np.linalg.det(np.array(m)))
        if (exact_input and d == 0) or (not exact_input and abs(d) < 1e-12):
            raise SingularMetricError("invariant metric is degenerate")
        self.algebra = algebra
        self.matrix = m
        self.is_exact = exact_input and algebra.is_exact

    @classmethod
    def from_entries(cls, algebra: LieAlgebra, entries: dict[tuple[int, int], object]) -> "InvariantMetric":
        """``{(i, j): value}`` with 1-based indices; symmetric entries implied."""
        r = algebra.dim
        m = [[Fraction(0)] * r for _ in range(r)]
        for (i, j), v in entries.items():
            m[i - 1][j - 1] = m[j - 1][i - 1] = v if isinstance(v, float) else Fraction(v)
        return cls(algebra, m)

    def inner(self, u: Sequence, v: Sequence):
        r = len(u)
        return sum((u[i] * self.matrix[i][j] * v[j] for i in range(r) if u[i]
                    for j in range(r) if v[j]), Fraction(0))

    def signature(self) -> tuple[int, int]:
        vals = np.linalg.eigvalsh(np.array(self.matrix, dtype=float))
        return int((vals < 0).sum()), int((vals > 0).sum())


@dataclass(frozen=True)
class InvariantConnection:
    """``A[i][j][k]`` = A^k_ij with nabla_{e_i} e_j = sum_k A^k_ij e_k."""

    algebra: LieAlgebra
    metric: InvariantMetric
    A: tuple

    def covariant(self, i: int, v: Sequence) -> list:
        """nabla_{e_i} v for a constant-coefficient vector v."""
        r = self.algebra.dim
        out = [Fraction(0)] * r
        for j in range(r):
            if v[j]:
                for k in range(r):
                    out[k] += v[j] * self.A[i][j][k]
        return out

    def derivative(self, u: Sequence, v: Sequence) -> list:
        r = self.algebra.dim
        out = [Fraction(0)] * r
        for i in range(r):
            if u[i]:
                d = self.covariant(i, v)
                out = [o + u[i] * x for o, x in zip(out, d)]
        return out

    def torsion_check(self) -> Verdict:
        L = self.algebra
        r = L.dim
        for i in range(r):
            for j in range(r):
                for k in range(r):
                    res = self.A[i][j][k] - self.A[j][i][k] - L.c[i][j][k]
                    if not L.is_zero_number(res):
                        return Verdict(False, Confidence.EXACT, {"i": i + 1, "j": j + 1, "k": k + 1},
                                       f"torsion residual {res}")
        return Verdict(True, Confidence.EXACT, None, "torsion-free")

    def compatibility_check(self) -> Verdict:
        L = self.algebra
        r = L.dim
        g = self.metric
        basis = _basis(r)
        for i in range(r):
            for j in range(r):
                for k in range(r):
                    res = g.inner(self.A[i][j], basis[k]) + g.inner(basis[j], self.A[i][k])
                    if not L.is_zero_number(res):
                        return Verdict(False, Confidence.EXACT, {"i": i + 1, "j": j + 1, "k": k + 1},
                                       f"metric compatibility residual {res}")
        return Verdict(True, Confidence.EXACT, None, "metric-compatible")

    def nonzero(self) -> dict[tuple[int, int], list]:
        out = {}
        for i, block in enumerate(self.A):
            for j, vec in enumerate(block):
                if any(not self.algebra.is_zero_number(x) for x in vec):
                    out[(i, j)] = list(vec)
        return out

    def describe(self) -> list[str]:
        labels = self.algebra.labels
        lines = []
        for (i, j), vec in self.nonzero().items():
            terms = " + ".join(_term(x, labels[k]) for k, x in enumerate(vec) if x)
            lines.append(f"nabla_{labels[i]} {labels[j]} = {terms.replace('+ -', '- ')}")
        return lines


def _term(x, label: str) -> str:
    if x == 1:
        return label
    if x == -1:
        return f"-{label}"
    return f"{x}*{label}"


def _basis(r: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for i in range(r)] for j in range(r)]


def koszul_connection(L: LieAlgebra, g: InvariantMetric) -> InvariantConnection:
    r = L.dim
    basis = _basis(r)
    brackets = [[L.bracket(basis[i], basis[j]) for j in range(r)] for i in range(r)]
    gram = g.matrix
    if g.is_exact:
        ginv = exact.inverse(gram)
    else:
        ginv = np.linalg.inv(np.array(gram, dtype=float)).tolist()
    A = []
    half = Fraction(1, 2)
    for i in range(r):
        row = []
        for j in range(r):
            rhs = [half * (g.inner(brackets[i][j], basis[k]) - g.inner(brackets[j][k], basis[i])
                           + g.inner(brackets[k][i], basis[j])) for k in range(r)]
            # sum_m A^m g_mk = rhs_k
            row.append(tuple(sum((ginv[m][k] * rhs[k] for k in range(r)), Fraction(0)) for m in range(r)))
        A.append(tuple(row))
    return InvariantConnection(L, g, tuple(A))


def _subspace_vectors(subspace, r: int) -> list[list]:
    """0-based basis indices or explicit coefficient vectors."""
    vectors = []
    for s in subspace:
        if isinstance(s, int):
            vectors.append(_basis(r)[s])
        else:
            if len(s) != r:
                raise ValueError(f"subspace vector must have {r} entries")
            vectors.append([x if isinstance(x, float) else Fraction(x) for x in s])
    if all(isinstance(x, Fraction) for v in vectors for x in v):
        independent = exact.rank(vectors) == len(vectors)
    else:
        independent = exact.numeric_rank(vectors) == len(vectors)
    if not independent:
        raise ValueError("subspace vectors are linearly dependent")
    return vectors


def _in_span(v, vectors, L: LieAlgebra) -> bool:
    if L.is_exact:
        return exact.rank(vectors + [v]) == len(vectors)
    return exact.numeric_rank(vectors + [v]) == len(vectors)


def invariant_is_parallel(subspace, conn: InvariantConnection) -> Verdict:
    """Whether nabla_{e_i} v stays in the subspace for every i and generator v."""
    L = conn.algebra
    vectors = _subspace_vectors(subspace, L.dim)
    conf = Confidence.EXACT if L.is_exact else Confidence.PROBABILISTIC
    for a, v in enumerate(vectors):
        for i in range(L.dim):
            w = conn.covariant(i, v)
            if not _in_span(w, vectors, L):
                return Verdict(False, conf, {"direction": L.labels[i], "generator": a + 1,
                                             "image": [str(x) for x in w]},
                               f"nabla_{L.labels[i]} of generator {a + 1} leaves the subspace")
    return Verdict(True, conf, None, "subspace is parallel")


def is_isotropic(subspace, g: InvariantMetric) -> Verdict:
    vectors = _subspace_vectors(subspace, g.algebra.dim)
    for a, u in enumerate(vectors):
        for b in range(a, len(vectors)):
            value = g.inner(u, vectors[b])
            if not g.algebra.is_zero_number(value):
                return Verdict(False, Confidence.EXACT, {"pair": [a + 1, b + 1]},
                               f"g(v{a + 1}, v{b + 1}) = {value}")
    return Verdict(True, Confidence.EXACT, None, "totally isotropic")


@dataclass
class InvariantWalkerReport:
    isotropic: Verdict
    parallel: Verdict
    subalgebra: LieAlgebra | None = None
    classification: ClassificationLabel | None = None
    diagnostics: list[str] = field(default_factory=list)


def walker_check_invariant(L: LieAlgebra, g: InvariantMetric, subspace,
                           conn: InvariantConnection | None = None, rng=None) -> InvariantWalkerReport:
    """Isotropy, parallelism and, when both hold, the structure subalgebra of
    a subspace of left-invariant fields."""
    conn = conn or koszul_connection(L, g)
    vectors = _subspace_vectors(subspace, L.dim)
    report = InvariantWalkerReport(is_isotropic(vectors, g), invariant_is_parallel(vectors, conn))
    if not (report.isotropic and report.parallel):
        return report
    k = len(vectors)
    cols = [[vectors[a][i] for a in range(k)] for i in range(L.dim)]
    constants = [[[Fraction(0)] * k for _ in range(k)] for _ in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            br = L.bracket(vectors[a], vectors[b])
            coeffs = exact.solve(cols, br) if L.is_exact else \
                np.linalg.lstsq(np.array(cols, dtype=float), np.array(br, dtype=float), rcond=None)[0].tolist()
            if coeffs is None or not _in_span(br, vectors, L):
                raise InconsistencyError(
                    f"parallel subspace not closed under brackets: [v{a + 1}, v{b + 1}] = {br}")
            for c in range(k):
                constants[a][b][c] = coeffs[c]
                constants[b][a][c] = -coeffs[c]
    sub = LieAlgebra(constants, [f"v{a + 1}" for a in range(k)])
    report.subalgebra = sub
    report.classification = classify(sub, rng)
    return report
