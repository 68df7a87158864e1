import itertools
from fractions import Fraction

import numpy as np
import pytest

from walker import (InvariantMetric, LieAlgebra, invariant_is_parallel, is_isotropic,
                    koszul_connection, walker_check_invariant)
from walker.errors import SingularMetricError
from walker.verdict import Confidence

# [E1,E3]=E1, [E2,E4]=E2 with g(E1,E3)=g(E2,E4)=1
E_ALG = LieAlgebra.from_brackets(4, {(1, 3): {1: 1}, (2, 4): {2: 1}}, labels=["E1", "E2", "E3", "E4"])
E_METRIC = InvariantMetric.from_entries(E_ALG, {(1, 3): 1, (2, 4): 1})
# [Y1,Y2]=Y1, [Y2,Y3]=Y3 with g(Y1,Y3)=g(Y2,Y4)=1
Y_ALG = LieAlgebra.from_brackets(4, {(1, 2): {1: 1}, (2, 3): {3: 1}}, labels=["Y1", "Y2", "Y3", "Y4"])
Y_METRIC = InvariantMetric.from_entries(Y_ALG, {(1, 3): 1, (2, 4): 1})
H_ALG = LieAlgebra.from_brackets(3, {(1, 2): {3: 1}})
H_METRIC = InvariantMetric(H_ALG, [[1, 0, 0], [0, 2, 0], [0, 0, 1]])


def oracle_connection(L, g):
    """Solve torsion-freeness and metric compatibility as one linear system in A^k_ij."""
    r = L.dim
    G = np.array(g.matrix, dtype=float)
    c = np.array(L.c, dtype=float)
    idx = {t: n for n, t in enumerate(itertools.product(range(r), repeat=3))}
    rows, rhs = [], []
    for i, j, k in itertools.product(range(r), repeat=3):
        row = np.zeros(len(idx))
        row[idx[i, j, k]] += 1
        row[idx[j, i, k]] -= 1
        rows.append(row)
        rhs.append(c[i, j, k])
        row = np.zeros(len(idx))
        for m in range(r):
            row[idx[i, j, m]] += G[m, k]
            row[idx[i, k, m]] += G[j, m]
        rows.append(row)
        rhs.append(0.0)
    sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    return sol.reshape(r, r, r)


def as_array(conn):
    return np.array([[[float(x) for x in vec] for vec in block] for block in conn.A])


CASES = {"E": (E_ALG, E_METRIC), "Y": (Y_ALG, Y_METRIC), "heisenberg": (H_ALG, H_METRIC)}


@pytest.mark.parametrize("name", CASES)
def test_connection_matches_linear_solve(name):
    L, g = CASES[name]
    conn = koszul_connection(L, g)
    assert np.allclose(as_array(conn), oracle_connection(L, g), atol=1e-12)


@pytest.mark.parametrize("name", CASES)
def test_torsion_free_and_compatible(name):
    L, g = CASES[name]
    conn = koszul_connection(L, g)
    t, m = conn.torsion_check(), conn.compatibility_check()
    assert t.value and m.value
    assert t.confidence is Confidence.EXACT is m.confidence


def test_abelian_algebra_has_zero_connection():
    L = LieAlgebra.abelian(3)
    g = InvariantMetric(L, [[0, 0, 1], [0, -1, 0], [1, 0, 0]])
    assert koszul_connection(L, g).nonzero() == {}


def test_y_frame_connection_on_first_field():
    conn = koszul_connection(Y_ALG, Y_METRIC)
    assert conn.covariant(1, [1, 0, 0, 0]) == [-1, 0, 0, 0]
    assert "nabla_Y2 Y1 = -Y1" in conn.describe()


def test_e_frame_derivatives_stay_in_span():
    conn = koszul_connection(E_ALG, E_METRIC)
    for i in range(4):
        for v in ([1, 0, 0, 0], [0, 1, 0, 0]):
            w = conn.covariant(i, v)
            assert w[2] == 0 and w[3] == 0
    assert conn.covariant(2, [1, 0, 0, 0]) == [-1, 0, 0, 0]


def test_e_plane_is_a_walker_subspace():
    rep = walker_check_invariant(E_ALG, E_METRIC, [0, 1])
    assert rep.isotropic.value and rep.parallel.value
    assert rep.subalgebra.nonzero_brackets() == {}
    assert rep.classification.model == "AbelianWalker"


def test_y_plane_spanned_by_first_two_fields():
    rep = walker_check_invariant(Y_ALG, Y_METRIC, [0, 1])
    # g(Y2, Y2) = 0 and nabla keeps Y1, Y2 in their span
    assert rep.isotropic.value
    assert rep.parallel.value
    assert rep.subalgebra.nonzero_brackets() == {(1, 2): {1: 1}}


def test_y_plane_of_first_and_fourth_fields():
    # the only nonzero derivatives are nabla_Y2 Y1 = -Y1 and nabla_Y2 Y3 = Y3
    assert koszul_connection(Y_ALG, Y_METRIC).describe() == ["nabla_Y2 Y1 = -Y1", "nabla_Y2 Y3 = Y3"]
    rep = walker_check_invariant(Y_ALG, Y_METRIC, [0, 3])
    assert rep.isotropic.value and rep.parallel.value
    assert rep.classification.model == "AbelianWalker"


def test_non_isotropic_subspace():
    v = is_isotropic([0, 2], E_METRIC)
    assert not v.value and v.witness == {"pair": [1, 2]}


def test_explicit_subspace_vectors():
    assert is_isotropic([[1, 1, 0, 0], [0, 1, 0, 0]], E_METRIC).value
    with pytest.raises(ValueError):
        is_isotropic([[1, 0, 0, 0], [2, 0, 0, 0]], E_METRIC)


def test_zero_connection_makes_every_subspace_parallel():
    L = LieAlgebra.abelian(4)
    g = InvariantMetric.from_entries(L, {(1, 3): 1, (2, 4): 1})
    conn = koszul_connection(L, g)
    for k in (1, 2):
        for sub in itertools.combinations(range(4), k):
            assert invariant_is_parallel(list(sub), conn).value


def test_degenerate_metric_is_rejected():
    with pytest.raises(SingularMetricError):
        InvariantMetric.from_entries(E_ALG, {(1, 3): 1})
    with pytest.raises(ValueError):
        InvariantMetric(E_ALG, [[0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])


def test_signature_of_neutral_metric():
    assert E_METRIC.signature() == (2, 2)
    assert isinstance(koszul_connection(E_ALG, E_METRIC).A[0][0][0], Fraction)
