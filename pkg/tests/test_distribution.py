import itertools
import random

import numpy as np
import pytest

from oracles import random_polynomial
from walker import (Chart, Distribution, MetricTensor, VectorField, bracket, build_walker3,
                    build_walker4, build_walker_general, in_span, is_involutive, is_parallel,
                    is_parallel_frame, is_totally_isotropic, orthogonal_complement,
                    transverse_connection)
from walker.errors import NotParallelError, RankError
from walker.distribution import sample_points
from walker.symexpr import is_zero, parse
from walker.verdict import Confidence

C3 = Chart.standard(3)
C4 = Chart.standard(4)


def coord(chart, *idx):
    return Distribution.coordinate(chart, list(idx))


def field(chart, *comps):
    return VectorField(chart, list(comps))


# isotropy ---------------------------------------------------------------------

def test_distribution_direction_is_null():
    g = build_walker3("x2^2 + x3")
    assert is_totally_isotropic(coord(C3, 0), g).value


def test_middle_direction_is_not_null():
    for eps in (1, -1):
        v = is_totally_isotropic(coord(C3, 1), build_walker3("x1", eps))
        assert not v.value and str(eps) in v.detail


def test_walker4_plane_is_null():
    assert is_totally_isotropic(coord(C4, 0, 1), build_walker4("x1*x3", "x4^2", "x2")).value


def test_isotropic_rank_above_half_dimension_is_impossible():
    rnd = random.Random(8)
    for _ in range(10):
        a, b, c = (random_polynomial(rnd, list(C4.names), 2, 3) for _ in range(3))
        g = build_walker4(a, b, c)
        for idx in itertools.combinations(range(4), 3):
            assert not is_totally_isotropic(coord(C4, *idx), g).value


def test_walker_candidate_rank_bound():
    with pytest.raises(RankError):
        Distribution.coordinate(C3, [0, 1], walker_candidate=True)


# involutivity -----------------------------------------------------------------

def test_coordinate_fields_commute():
    assert is_involutive(coord(C3, 0, 1)).value


def test_field_vanishing_on_a_hyperplane_is_rejected():
    # [d1, x1 d2] = d2 would escape, but the span already drops rank at x1 = 0
    with pytest.raises(RankError) as info:
        Distribution(C3, [field(C3, 1, 0, 0), field(C3, 0, "x1", 0)])
    assert info.value.witness["x1"] == 0


def test_bracket_of_fields():
    X = field(C3, 1, 0, 0)
    Y = field(C3, 0, "x1", 0)
    assert str(bracket(X, Y)) == "d_x2"
    assert str(bracket(Y, X)) == "(-1)*d_x2"


def test_commuting_noncoordinate_fields():
    D = Distribution(C3, [field(C3, "x2", 1, 0), field(C3, 0, 0, 1)])
    v = is_involutive(D)
    assert v.value
    assert str(bracket(*D.fields)) == "0"


def test_contact_plane_is_not_involutive():
    D = Distribution(C3, [field(C3, 1, 0, 0), field(C3, 0, 1, "x1")])
    v = is_involutive(D)
    assert not v.value and v.confidence is Confidence.PROBABILISTIC
    assert v.witness is not None


def test_span_membership_exact_for_constant_fields():
    D = Distribution(C3, [field(C3, 1, 1, 0), field(C3, 0, 0, 1)])
    inside = field(C3, "x3", "x3", "x1")
    outside = field(C3, 1, 0, 0)
    assert in_span(inside.rat, D).confidence is Confidence.EXACT
    assert in_span(inside.rat, D).value
    assert not in_span(outside.rat, D).value


# parallelism ------------------------------------------------------------------

def test_distribution_is_parallel_in_walker3():
    assert is_parallel(coord(C3, 0), build_walker3("x1^2*x2 + sin(x3)")).value


def test_middle_direction_is_not_parallel():
    v = is_parallel(coord(C3, 1), build_walker3("x2^2"))
    assert not v.value and "d_x3" in v.detail


def test_walker4_plane_is_parallel():
    assert is_parallel(coord(C4, 0, 1), build_walker4("x1*x3", "x2*x4", "x1^2")).value


@pytest.mark.parametrize("f, expected", [("x2 + x3", True), ("x1", False), ("x2*x3^2", True),
                                         ("x1*x2", False)])
def test_parallel_frame_iff_f_independent_of_x1(f, expected):
    assert is_parallel_frame([VectorField.coordinate(C3, 0)], build_walker3(f)).value is expected


def test_strict_walker4_frame_is_parallel():
    g = build_walker4("x3^2", "x4*x3", "sin(x4)")
    assert is_parallel_frame([VectorField.coordinate(C4, i) for i in (0, 1)], g).value
    g = build_walker4("x1", "0", "0")
    assert not is_parallel_frame([VectorField.coordinate(C4, i) for i in (0, 1)], g).value


def builder_corpus():
    rnd = random.Random(31)
    n3, n4 = list(C3.names), list(C4.names)
    for _ in range(4):
        g = build_walker3(random_polynomial(rnd, n3), rnd.choice([1, -1]))
        yield g, [0]
        g = build_walker4(*(random_polynomial(rnd, n4, 2, 3) for _ in range(3)))
        yield g, [0, 1]
    g = build_walker_general(1, [["1", "0"], ["0", "-1"]], [["x2", "0"]], [["x1*x4"]])
    yield g, [0]


def test_parallel_implies_involutive_over_corpus():
    for g, idx in builder_corpus():
        n = g.n
        for k in range(1, n // 2 + 1):
            for chosen in itertools.combinations(range(n), k):
                D = Distribution.coordinate(g.chart, list(chosen))
                if is_parallel(D, g).value:
                    assert is_involutive(D).value
        assert is_parallel(Distribution.coordinate(g.chart, idx), g).value


# orthogonal complement -------------------------------------------------------

def test_complement_in_walker3_is_a_plane():
    Dp = orthogonal_complement(coord(C3, 0), build_walker3("x2^2"))
    assert Dp.rank == 2
    assert Dp.coordinate_indices == [0, 1]


def test_complement_in_walker4_is_the_distribution():
    g = build_walker4("x1", "x2", "x3")
    Dp = orthogonal_complement(coord(C4, 0, 1), g)
    assert Dp.rank == 2
    assert Dp.coordinate_indices == [0, 1]


def test_complement_for_definite_metric():
    g = MetricTensor(C4, [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 3, 0], [0, 0, 0, 4]], (0, 4))
    Dp = orthogonal_complement(coord(C4, 0), g)
    assert Dp.coordinate_indices == [1, 2, 3]


def test_complement_has_complementary_rank_and_contains_null_distribution():
    for g, idx in builder_corpus():
        D = Distribution.coordinate(g.chart, idx)
        Dp = orthogonal_complement(D, g)
        assert Dp.rank == g.n - len(idx)
        for X in D.fields:
            assert Dp.contains(X).value


# transverse connection -------------------------------------------------------

def test_transverse_coefficients_for_walker3():
    names = C3.names
    for eps in (1, -1):
        g = build_walker3("x1^2*x2 + x3*x2^2", eps)
        T = transverse_connection(g, coord(C3, 0))
        assert T.lift_check.value
        f2 = parse(f"-({eps})*(x1^2 + 2*x3*x2)/2", names)
        f1 = parse("-(2*x1*x2)/2", names)
        nz = T.nonzero()
        assert set(nz) == {(2, 1, 0), (2, 1, 1)}
        assert is_zero(nz[(2, 1, 0)] - f2).value
        assert is_zero(nz[(2, 1, 1)] - f1).value


def test_flat_metric_has_trivial_transverse_connection():
    T = transverse_connection(build_walker4("0", "0", "0"), coord(C4, 0, 1))
    assert T.nonzero() == {}


def test_lift_shift_leaves_coefficients_unchanged():
    g = build_walker3("x1*x3 + x2^3")
    D = coord(C3, 0)
    plain = transverse_connection(g, D)
    shifted = transverse_connection(g, D, [field(C3, 0, 1, 0), field(C3, "x2", 0, 1)])
    assert plain.lift_check.value and shifted.lift_check.value
    for key in set(plain.nonzero()) | set(shifted.nonzero()):
        a, b, c = key
        assert is_zero(plain.coefficients[a][b][c] - shifted.coefficients[a][b][c]).value


def test_transverse_connection_refuses_non_parallel_distribution():
    with pytest.raises(NotParallelError):
        transverse_connection(build_walker3("x2^2"), coord(C3, 1))


def test_transverse_connection_needs_full_frame():
    with pytest.raises(RankError):
        transverse_connection(build_walker3("x2"), coord(C3, 0), [field(C3, 0, 1, 0)])
    with pytest.raises(RankError):
        transverse_connection(build_walker3("x2"), coord(C3, 0),
                              [field(C3, 1, 1, 0), field(C3, 0, 1, 0)])


def test_sample_points_are_reproducible():
    a = sample_points(C3, np.random.default_rng(1))
    b = sample_points(C3, np.random.default_rng(1))
    assert a == b and len(a) == 16
