"""Small dense matrices of rational functions in the coordinates.

Entries are :class:`~walker.symexpr.Rat` values; determinants use cofactor
expansion with memoised minors, which is exact and keeps the sparse
Walker matrices cheap.
"""
from __future__ import annotations

from .symexpr import Rat

RatMatrix = list[list[Rat]]

_ZERO = Rat.const(0)
_ONE = Rat.const(1)


def identity(n: int) -> RatMatrix:
    return [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)]


def matmul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    cols = list(zip(*b))
    out = []
    for row in a:
        new = []
        for col in cols:
            acc = _ZERO
            for x, y in zip(row, col):
                if x.num and y.num:
                    acc = acc + x * y
            new.append(acc)
        out.append(new)
    return out


def transpose(a: RatMatrix) -> RatMatrix:
    return [list(col) for col in zip(*a)]


class _Minors:
    def __init__(self, a: RatMatrix):
        self.a = a
        self.memo: dict[tuple[tuple[int, ...], tuple[int, ...]], Rat] = {}

    def det(self, rows: tuple[int, ...], cols: tuple[int, ...]) -> Rat:
        if not rows:
            return _ONE
        key = (rows, cols)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        # expand along the sparsest row of the submatrix
        best = min(rows, key=lambda r: sum(1 for c in cols if self.a[r][c].num))
        rest = tuple(r for r in rows if r != best)
        sign_row = rows.index(best)
        acc = _ZERO
        for k, c in enumerate(cols):
            entry = self.a[best][c]
            if not entry.num:
                continue
            minor = self.det(rest, cols[:k] + cols[k + 1:])
            if not minor.num:
                continue
            term = entry * minor
            acc = acc - term if (sign_row + k) % 2 else acc + term
        self.memo[key] = acc
        return acc


def det(a: RatMatrix) -> Rat:
    n = len(a)
    return _Minors(a).det(tuple(range(n)), tuple(range(n)))


def adjugate_inverse(a: RatMatrix) -> tuple[RatMatrix, Rat]:
    """Return ``(inverse, determinant)``; raises ``ZeroDivisionError`` if the
    determinant is the zero rational function."""
    n = len(a)
    minors = _Minors(a)
    full = tuple(range(n))
    d = minors.det(full, full)
    if d.is_zero():
        raise ZeroDivisionError("determinant is identically zero")
    inv_d = d.inverse()
    out = [[_ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            # (A^-1)_{ij} = (-1)^{i+j} M_{ji} / det
            cof = minors.det(tuple(r for r in full if r != j), tuple(c for c in full if c != i))
            if cof.num:
                cof = -cof if (i + j) % 2 else cof
                out[i][j] = cof * inv_d
    return out, d


def solve_linear(a: RatMatrix, b: list[Rat]) -> list[Rat] | None:
    """Gauss-Jordan solve of a square system over rational functions.
    Returns None when the system is symbolically singular."""
    n = len(a)
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if aug[i][col].num), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv if x.num else x for x in aug[col]]
        for i in range(n):
            f = aug[i][col]
            if i != col and f.num:
                aug[i] = [x - f * y if y.num else x for x, y in zip(aug[i], aug[col])]
    return [row[n] for row in aug]
