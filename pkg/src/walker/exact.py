"""Exact linear algebra and univariate polynomials over the rationals.

Matrices are lists of rows of :class:`~fractions.Fraction`. Univariate
polynomials are coefficient lists, lowest degree first, with no trailing
zeros (the zero polynomial is ``[]``).
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

NUMERIC_RANK_TOL = 1e-9


def to_fractions(rows) -> list[list[Fraction]]:
    return [[Fraction(x) if not isinstance(x, float) else Fraction(str(x)) for x in row] for row in rows]


def _integer_rows(rows):
    out = []
    for row in rows:
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        out.append([int(x * lcm) for x in row])
    return out


def rank(rows) -> int:
    """Rank by fraction-free (Bareiss) elimination."""
    a = _integer_rows(to_fractions(rows))
    if not a or not a[0]:
        return 0
    m, n = len(a), len(a[0])
    r = 0
    prev = 1
    for col in range(n):
        pivot = next((i for i in range(r, m) if a[i][col]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        for i in range(r + 1, m):
            for j in range(col + 1, n):
                a[i][j] = (a[r][col] * a[i][j] - a[i][col] * a[r][j]) // prev
            a[i][col] = 0
        prev = a[r][col]
        r += 1
        if r == m:
            break
    return r


def rref(rows) -> tuple[list[list[Fraction]], list[int]]:
    a = [list(row) for row in to_fractions(rows)]
    pivots = []
    if not a:
        return a, pivots
    m, n = len(a), len(a[0])
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, m) if a[i][col]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][col]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    return a, pivots


def nullspace(rows, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : A v = 0}."""
    if not rows:
        n = ncols or 0
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    a, pivots = rref(rows)
    n = len(a[0])
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -a[i][f]
        basis.append(v)
    return basis


def solve(a, b) -> list[Fraction] | None:
    """Solution of ``A x = b`` (any one, free variables zero), or None."""
    aug = [list(row) + [bi] for row, bi in zip(to_fractions(a), to_fractions([b])[0])]
    red, pivots = rref(aug)
    n = len(aug[0]) - 1
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = red[i][n]
    return x


def det(rows) -> Fraction:
    a = [list(r) for r in to_fractions(rows)]
    n = len(a)
    out = Fraction(1)
    for col in range(n):
        pivot = next((i for i in range(col, n) if a[i][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            out = -out
        out *= a[col][col]
        for i in range(col + 1, n):
            f = a[i][col] / a[col][col]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return out


def matmul(a, b):
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in zip(*b)] for row in a]


def inverse(rows) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(to_fractions(rows))]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def numeric_rank(rows, tol: float = NUMERIC_RANK_TOL) -> int:
    """Rank by Gaussian elimination with full pivoting; entries below
    ``tol`` times the largest initial entry count as zero."""
    a = np.array(rows, dtype=float, copy=True)
    if a.size == 0:
        return 0
    scale = max(1.0, float(np.abs(a).max()))
    m, n = a.shape
    r = 0
    while r < min(m, n):
        sub = np.abs(a[r:, r:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= tol * scale:
            break
        i += r
        j += r
        a[[r, i]] = a[[i, r]]
        a[:, [r, j]] = a[:, [j, r]]
        a[r + 1:] -= np.outer(a[r + 1:, r] / a[r, r], a[r])
        r += 1
    return r


# univariate polynomials ----------------------------------------------------

def p_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def p_degree(p) -> int:
    return len(p) - 1


def p_sub(p, q):
    n = max(len(p), len(q))
    return p_trim([(p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0) for i in range(n)])


def p_mul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return p_trim(out)


def p_divmod(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = [Fraction(x) for x in p]
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    lead = Fraction(q[-1])
    while len(p) >= len(q) and p:
        shift = len(p) - len(q)
        f = p[-1] / lead
        quot[shift] = f
        for i, c in enumerate(q):
            p[i + shift] -= f * c
        p = p_trim(p)
    return p_trim(quot), p


def p_monic(p):
    return [Fraction(c) / p[-1] for c in p] if p else []


def p_gcd(p, q):
    p, q = p_trim(p), p_trim(q)
    while q:
        p, q = q, p_divmod(p, q)[1]
    return p_monic(p)


def p_deriv(p):
    return p_trim([i * p[i] for i in range(1, len(p))])


def p_eval(p, x):
    out = 0
    for c in reversed(p):
        out = out * x + c
    return out


def squarefree_decomposition(p) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm: ``p = lc * prod a_k^k`` with squarefree, pairwise
    coprime ``a_k``. Returns ``[(a_k, k), ...]`` for non-constant factors."""
    p = p_monic(p_trim(p))
    if p_degree(p) < 1:
        return []
    out = []
    dp = p_deriv(p)
    a = p_gcd(p, dp)
    b = p_divmod(p, a)[0]
    c = p_divmod(dp, a)[0]
    d = p_sub(c, p_deriv(b))
    k = 1
    while p_degree(b) > 0:
        a = p_gcd(b, d)
        if p_degree(a) > 0:
            out.append((a, k))
        b = p_divmod(b, a)[0]
        c = p_divmod(d, a)[0]
        d = p_sub(c, p_deriv(b))
        k += 1
    return out


def _sign_at_infinity(p, positive: bool) -> int:
    if not p:
        return 0
    lead = 1 if p[-1] > 0 else -1
    if positive or p_degree(p) % 2 == 0:
        return lead
    return -lead


def sturm_sequence(p):
    seq = [p_trim(p), p_deriv(p_trim(p))]
    while seq[-1]:
        rem = p_divmod(seq[-2], seq[-1])[1]
        seq.append([-c for c in rem])
    return seq[:-1]


def distinct_real_roots(p) -> int:
    """Number of distinct real roots, by Sturm's theorem on (-inf, inf)."""
    p = p_trim(p)
    if p_degree(p) < 1:
        return 0
    seq = sturm_sequence(p)

    def changes(signs):
        signs = [s for s in signs if s]
        return sum(1 for u, v in zip(signs, signs[1:]) if u != v)

    return (changes([_sign_at_infinity(q, False) for q in seq])
            - changes([_sign_at_infinity(q, True) for q in seq]))


def real_root_count(p) -> int:
    """Number of real roots counted with multiplicity."""
    return sum(k * distinct_real_roots(a) for a, k in squarefree_decomposition(p))


def charpoly(rows) -> list[Fraction]:
    """det(x I - A) by the Faddeev-LeVerrier recursion (exact)."""
    a = to_fractions(rows)
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = [[Fraction(0)] * n for _ in range(n)]
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        am = matmul(a, m)
        m = [[am[i][j] + coeffs[n - k + 1] * ident[i][j] for j in range(n)] for i in range(n)]
        am = matmul(a, m)
        coeffs[n - k] = -sum(am[i][i] for i in range(n)) / k
    return coeffs
