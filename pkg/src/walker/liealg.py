"""Finite-dimensional real Lie algebras given by structure constants.

``c[i][j][k]`` is c^k_ij, so [e_i, e_j] = sum_k c^k_ij e_k (0-based).
Constants are exact rationals whenever every input is rational; float
input switches rank decisions to tolerance-based elimination.
"""
from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exact, symmatrix
from .distribution import bracket, is_parallel_frame
from .errors import ConstancyError, InconsistencyError, NotInvolutiveError, NotParallelError
from .metric import MetricTensor
from .symexpr import DEFAULT_SEED, Rat, evaluate, from_rat, is_zero
from .verdict import Confidence, Verdict

FLOAT_TOL = 1e-9
RANDOM_SAMPLES = 20


def _number(x):
    if isinstance(x, float):
        return x
    return Fraction(x)


class LieAlgebra:
    """Structure constants with antisymmetry enforced at construction."""

    def __init__(self, constants, labels: Sequence[str] | None = None):
        c = [[[_number(x) for x in row] for row in block] for block in constants]
        r = len(c)
        if any(len(block) != r or any(len(row) != r for row in block) for block in c):
            raise ValueError("structure constants must be an r x r x r array")
        self.dim = r
        self.c = c
        self.labels = tuple(labels) if labels is not None else tuple(f"e{i + 1}" for i in range(r))
        self.is_exact = all(isinstance(x, Fraction) for x in self._flat())
        for i in range(r):
            for j in range(r):
                for k in range(r):
                    if not self._close(c[i][j][k], -c[j][i][k]):
                        raise ValueError(f"constants not antisymmetric at ({i + 1},{j + 1},{k + 1})")

    @classmethod
    def from_brackets(cls, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]],
                      labels=None) -> "LieAlgebra":
        """Build from ``{(i, j): {k: c}}`` with 1-based indices; the entry for
        (j, i) is filled in by antisymmetry."""
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j), coeffs in brackets.items():
            if i == j:
                raise ValueError(f"bracket [{i},{i}] must vanish")
            for k, v in coeffs.items():
                v = _number(v)
                c[i - 1][j - 1][k - 1] = v
                c[j - 1][i - 1][k - 1] = -v
        return cls(c, labels)

    @classmethod
    def abelian(cls, r: int) -> "LieAlgebra":
        return cls.from_brackets(r, {})

    def _flat(self):
        return (x for block in self.c for row in block for x in row)

    def _close(self, a, b) -> bool:
        if isinstance(a, Fraction) and isinstance(b, Fraction):
            return a == b
        return abs(float(a) - float(b)) <= FLOAT_TOL

    def is_zero_number(self, x) -> bool:
        return x == 0 if isinstance(x, Fraction) else abs(x) <= FLOAT_TOL

    def bracket(self, u: Sequence, v: Sequence) -> list:
        r = self.dim
        out = [Fraction(0)] * r
        for i in range(r):
            if not u[i]:
                continue
            for j in range(r):
                if not v[j]:
                    continue
                uv = u[i] * v[j]
                row = self.c[i][j]
                for k in range(r):
                    if row[k]:
                        out[k] += uv * row[k]
        return out

    def ad(self, x: Sequence) -> list[list]:
        """Matrix of ad_x: column j is [x, e_j]."""
        r = self.dim
        basis = [[int(i == j) for i in range(r)] for j in range(r)]
        cols = [self.bracket(x, e) for e in basis]
        return [[cols[j][k] for j in range(r)] for k in range(r)]

    def nonzero_brackets(self) -> dict[tuple[int, int], dict[int, object]]:
        out = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                coeffs = {k + 1: v for k, v in enumerate(self.c[i][j]) if not self.is_zero_number(v)}
                if coeffs:
                    out[(i + 1, j + 1)] = coeffs
        return out

    def describe_brackets(self) -> list[str]:
        lines = []
        for (i, j), coeffs in self.nonzero_brackets().items():
            terms = " + ".join(self.labels[k - 1] if v == 1 else f"{v}*{self.labels[k - 1]}"
                               for k, v in coeffs.items())
            lines.append(f"[{self.labels[i - 1]},{self.labels[j - 1]}] = {terms}")
        return lines

    def change_basis(self, P) -> "LieAlgebra":
        """Constants in the basis f_a = sum_i P[i][a] e_i."""
        P = exact.to_fractions(P) if self.is_exact else np.asarray(P, dtype=float).tolist()
        Pinv = exact.inverse(P) if self.is_exact else np.linalg.inv(np.asarray(P)).tolist()
        r = self.dim
        cols = [[P[i][a] for i in range(r)] for a in range(r)]
        new = [[[Fraction(0)] * r for _ in range(r)] for _ in range(r)]
        for a in range(r):
            for b in range(r):
                br = self.bracket(cols[a], cols[b])
                for c in range(r):
                    new[a][b][c] = sum((Pinv[c][k] * br[k] for k in range(r)), Fraction(0))
        return LieAlgebra(new)

    def __eq__(self, other):
        return isinstance(other, LieAlgebra) and self.c == other.c

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, {self.describe_brackets() or 'abelian'})"


# Jacobi ---------------------------------------------------------------------

def jacobi_check(L: LieAlgebra) -> Verdict:
    """sum_m c^m_ij c^l_mk + c^m_jk c^l_mi + c^m_ki c^l_mj = 0 for all (i, j, k, l)."""
    r = L.dim
    c = L.c
    for i, j, k in itertools.combinations(range(r), 3):
        for l in range(r):
            total = sum((c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l] + c[k][i][m] * c[m][j][l]
                         for m in range(r)), Fraction(0))
            if not L.is_zero_number(total):
                return Verdict(False, Confidence.EXACT, {"i": i + 1, "j": j + 1, "k": k + 1, "l": l + 1},
                               f"cyclic sum {total} on ({i + 1},{j + 1},{k + 1}) component {l + 1}")
    return Verdict(True, Confidence.EXACT, None, "Jacobi identity holds")


# series ---------------------------------------------------------------------

def _basis(L: LieAlgebra, vectors) -> list:
    """Independent subset spanning ``vectors``."""
    vectors = [v for v in vectors if any(not L.is_zero_number(x) for x in v)]
    if L.is_exact:
        red, pivots = exact.rref(vectors) if vectors else ([], [])
        return red[:len(pivots)]
    chosen = []
    for v in vectors:
        if exact.numeric_rank(chosen + [v], FLOAT_TOL) > len(chosen):
            chosen.append(v)
    return chosen


def _series(L: LieAlgebra, step) -> list[int]:
    current = _basis(L, [[int(i == j) for i in range(L.dim)] for j in range(L.dim)])
    dims = [len(current)]
    while True:
        current = _basis(L, step(current))
        d = len(current)
        if d == dims[-1]:
            dims.append(d)
            return dims
        dims.append(d)
        if d == 0:
            return dims


def derived_series(L: LieAlgebra) -> list[int]:
    """Dimensions of g, [g,g], [[g,g],[g,g]], ... until 0 or a repeat."""
    return _series(L, lambda cur: [L.bracket(a, b) for a, b in itertools.combinations(cur, 2)])


def lower_central_series(L: LieAlgebra) -> list[int]:
    """Dimensions of g, [g,g], [g,[g,g]], ... until 0 or a repeat."""
    basis = [[int(i == j) for i in range(L.dim)] for j in range(L.dim)]
    return _series(L, lambda cur: [L.bracket(e, b) for e in basis for b in cur])


# classification -------------------------------------------------------------

MODEL_LABELS = ("AbelianWalker", "NilpotentWalker", "SolvableWalker", "NonSolvable")


@dataclass(frozen=True)
class ClassificationLabel:
    abelian: bool
    nilpotent: bool
    nilpotency_step: int | None
    solvable: bool
    derived_length: int | None
    completely_solvable: bool
    completely_solvable_verdict: Verdict
    non_solvable: bool
    model: str
    derived: tuple[int, ...] = ()
    lower_central: tuple[int, ...] = ()
    notes: tuple[str, ...] = field(default=())

    def describe(self) -> str:
        if self.abelian:
            return "abelian"
        if not self.solvable:
            return "non-solvable"
        parts = ["nilpotent" if self.nilpotent else "solvable, non-nilpotent"]
        if self.nilpotent:
            parts[0] += f" (step {self.nilpotency_step})"
        cs = self.completely_solvable_verdict
        if self.completely_solvable:
            parts.append(f"completely solvable ({cs.confidence.value})")
        else:
            parts.append(f"not completely solvable ({cs.confidence.value})")
        return ", ".join(parts)

    def key(self) -> tuple:
        """Isomorphism-invariant summary used to compare classifications."""
        return (self.abelian, self.nilpotent, self.nilpotency_step, self.solvable,
                self.derived_length, self.completely_solvable, self.model,
                self.derived, self.lower_central)


def _nonzero_terms(series: list[int]) -> int:
    terms = []
    for d in series:
        if d == 0 or (terms and d == terms[-1]):
            break
        terms.append(d)
    return len(terms)


def _random_rationals(rng, r: int) -> list[Fraction]:
    nums = rng.integers(-5, 6, r)
    dens = rng.integers(1, 5, r)
    return [Fraction(int(a), int(b)) for a, b in zip(nums, dens)]


def completely_solvable_check(L: LieAlgebra, rng=None, samples: int = RANDOM_SAMPLES) -> Verdict:
    """ad_X has only real eigenvalues for the basis vectors and ``samples``
    random rational combinations. A failure is exact; a pass is SAMPLED."""
    rng = rng if rng is not None else np.random.default_rng(DEFAULT_SEED)
    r = L.dim
    probes = [[Fraction(int(i == j)) for i in range(r)] for j in range(r)]
    probes += [_random_rationals(rng, r) for _ in range(samples)]
    for x in probes:
        ad = exact.to_fractions(L.ad(x))
        cp = exact.charpoly(ad)
        real = exact.real_root_count(cp)
        if real != r:
            return Verdict(False, Confidence.EXACT, {"X": [str(v) for v in x]},
                           f"characteristic polynomial of ad_X has {real} real roots of {r}")
    return Verdict(True, Confidence.SAMPLED, None, f"{len(probes)} adjoint operators with real spectrum")


def classify(L: LieAlgebra, rng=None) -> ClassificationLabel:
    derived = derived_series(L)
    lower = lower_central_series(L)
    abelian = all(L.is_zero_number(x) for x in L._flat())
    nilpotent = lower[-1] == 0
    solvable = derived[-1] == 0
    if solvable:
        cs = completely_solvable_check(L, rng)
    else:
        cs = Verdict(False, Confidence.EXACT, None, "not solvable")
    if abelian:
        model = "AbelianWalker"
    elif nilpotent:
        model = "NilpotentWalker"
    elif solvable:
        model = "SolvableWalker"
    else:
        model = "NonSolvable"
    label = ClassificationLabel(
        abelian=abelian,
        nilpotent=nilpotent,
        nilpotency_step=_nonzero_terms(lower) if nilpotent else None,
        solvable=solvable,
        derived_length=_nonzero_terms(derived) if solvable else None,
        completely_solvable=cs.value,
        completely_solvable_verdict=cs,
        non_solvable=not solvable,
        model=model,
        derived=tuple(derived),
        lower_central=tuple(lower),
    )
    _assert_implications(label)
    return label


def _assert_implications(label: ClassificationLabel) -> None:
    if label.abelian and not (label.nilpotent and label.nilpotency_step in (1, 0)):
        raise InconsistencyError("abelian algebra without nilpotency step 1")
    if label.nilpotent and not label.solvable:
        raise InconsistencyError("nilpotent algebra reported non-solvable")
    if label.nilpotent and not label.completely_solvable:
        raise InconsistencyError("nilpotent algebra reported not completely solvable")


# structure algebra of a parallel frame -------------------------------------------

def structure_algebra(frame, g: MetricTensor, rng=None, check_parallel: bool = True) -> LieAlgebra:
    """Constants c^k_ij with [X_i, X_j] = sum_k c^k_ij X_k for a parallel frame.

    Raises :class:`NotParallelError` if the frame is not parallel,
    :class:`NotInvolutiveError` if a bracket leaves the span and
    :class:`ConstancyError` (naming the coordinate) if a coefficient varies.
    The returned algebra carries ``constancy``, the combined verdict.
    """
    frame = list(frame)
    if check_parallel:
        v = is_parallel_frame(frame, g, rng)
        if not v:
            raise NotParallelError(f"frame is not parallel: {v.detail}")
    r = len(frame)
    n = g.n
    names = g.chart.names
    X = [f.rat for f in frame]
    zero = Rat.const(0)
    # Gram system (X^T X) c = X^T W: exact for vectors in the span
    gram = [[sum((X[a][i] * X[b][i] for i in range(n) if X[a][i].num and X[b][i].num), zero)
             for b in range(r)] for a in range(r)]
    constants = [[[Fraction(0)] * r for _ in range(r)] for _ in range(r)]
    verdicts = []
    for i in range(r):
        for j in range(i + 1, r):
            W = bracket(frame[i], frame[j]).rat
            rhs = [sum((X[a][m] * W[m] for m in range(n) if X[a][m].num and W[m].num), zero)
                   for a in range(r)]
            coeffs = symmatrix.solve_linear(gram, rhs)
            if coeffs is None:
                raise NotInvolutiveError("frame fields are linearly dependent")
            for m in range(n):
                residual = W[m] - sum((coeffs[a] * X[a][m] for a in range(r) if X[a][m].num), zero)
                v = is_zero(residual, rng)
                if not v:
                    raise NotInvolutiveError(f"[X{i + 1}, X{j + 1}] leaves the span of the frame")
            for k, ck in enumerate(coeffs):
                for name in names:
                    v = is_zero(ck.diff(name), rng)
                    if not v:
                        raise ConstancyError(
                            f"coefficient of X{k + 1} in [X{i + 1}, X{j + 1}] depends on {name}", name)
                    verdicts.append(v)
                value = ck.const_value() if ck.is_const() else \
                    evaluate(from_rat(ck), dict.fromkeys(names, 1.0))
                constants[i][j][k] = value
                constants[j][i][k] = -value
    L = LieAlgebra(constants, [f"X{a + 1}" for a in range(r)])
    L.constancy = Verdict.all_of(verdicts, "structure constants are constant")
    return L
