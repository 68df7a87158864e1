import random

import numpy as np
import pytest

from oracles import random_points, random_polynomial
from walker import (Chart, Distribution, build_walker3, build_walker4, build_walker_general, invert,
                    is_strict, is_totally_isotropic)
from walker.errors import SingularMetricError, SpecError, UnboundVariableError, UnknownIdentifierError
from walker.symexpr import Var, parse, to_rat
from walker.verdict import Confidence


def rows(g):
    return g.rows_as_text()


def test_walker3_flat():
    g = build_walker3("0")
    assert rows(g) == [["0", "0", "1"], ["0", "1", "0"], ["1", "0", "0"]]
    assert g.signature == (1, 2)


def test_walker3_entry_f():
    g = build_walker3("x2^2")
    assert rows(g)[2][2] == "x2^2"
    assert rows(g)[:2] == [["0", "0", "1"], ["0", "1", "0"]]


def test_walker3_negative_epsilon():
    g = build_walker3("x1^2 + x2", epsilon=-1)
    assert rows(g)[1][1] == "-1"
    assert rows(g)[2][2] == "x1^2 + x2"
    assert g.signature == (2, 1)


def test_walker4_entries():
    g = build_walker4("1", "1", "x1")
    r = rows(g)
    assert (r[2][2], r[3][3], r[2][3], r[3][2]) == ("1", "1", "x1", "x1")
    assert r[0][2] == r[1][3] == "1"
    assert g.signature == (2, 2)


def test_walker4_example_extra_entry_only():
    r = rows(build_walker4("x3^2", "0", "0"))
    flat = rows(build_walker4("0", "0", "0"))
    diff = [(i, j) for i in range(4) for j in range(4) if r[i][j] != flat[i][j]]
    assert diff == [(2, 2)] and r[2][2] == "x3^2"


def test_general_reproduces_walker3_and_walker4():
    assert build_walker_general(1, [["1"]], [["0"]], [["x1*x2 + x3"]]).matrix == \
        build_walker3("x1*x2 + x3").matrix
    assert build_walker_general(1, [["-1"]], [["0"]], [["x2"]]).matrix == build_walker3("x2", -1).matrix
    a, b, c = "x3^2", "x1*x4", "sin(x2)"
    assert build_walker_general(2, [], [[], []], [[a, c], [c, b]]).matrix == build_walker4(a, b, c).matrix


def test_general_flat_pairing_in_dimension_five():
    g = build_walker_general(1, [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"]],
                             [["0", "0", "0"]], [["0"]])
    m = g.at({n: 0.0 for n in g.chart.names})
    expected = np.zeros((5, 5))
    expected[0, 4] = expected[4, 0] = 1
    expected[1:4, 1:4] = np.eye(3)
    assert np.array_equal(m, expected)
    assert g.signature == (1, 4)


def test_general_rejects_bad_blocks():
    with pytest.raises(SpecError):
        build_walker_general(1, [["1", "x1"], ["0", "1"]], [["0", "0"]], [["0"]])
    with pytest.raises(SpecError):
        build_walker_general(2, [], [[], []], [["0"]])
    with pytest.raises(SingularMetricError):
        build_walker_general(1, [["0"]], [["0"]], [["0"]])


def test_foreign_coordinates_are_rejected():
    with pytest.raises(UnknownIdentifierError):
        build_walker3("x4")
    with pytest.raises(UnboundVariableError):
        build_walker3(Var("x4"))


def test_inverse_of_walker3_is_exact():
    rnd = random.Random(5)
    for eps in (1, -1):
        f = random_polynomial(rnd, ["x1", "x2", "x3"])
        g = build_walker3(f, eps)
        names = g.chart.names
        expected = [[f"-({f})", "0", "1"], ["0", str(eps), "0"], ["1", "0", "0"]]
        inv = invert(g)
        for i in range(3):
            for j in range(3):
                assert (inv.rat[i][j] - to_rat(parse(expected[i][j], names))).is_zero()


def test_inverse_numerically_at_100_points():
    g = build_walker3("x1^2*x2 - x3 + sin(x1)")
    inv = invert(g)
    rng = np.random.default_rng(0)
    for p in random_points(rng, g.chart.names, 100):
        assert np.allclose(g.at(p) @ inv.at(p), np.eye(3), atol=1e-9)


def test_flat_inverses():
    assert rows(invert(build_walker3("0"))) == rows(build_walker3("0"))
    g4 = build_walker4("0", "0", "0")
    assert rows(invert(g4)) == rows(g4)


def test_strictness():
    assert is_strict(build_walker3("x2^2 + x3")).value
    v = is_strict(build_walker3("3*x1^2 + x2"))
    assert not v.value and v.confidence is Confidence.EXACT
    assert is_strict(build_walker4("x3^2", "0", "0")).value
    assert not is_strict(build_walker4("0", "x2", "0")).value


def test_canonical_distribution_is_isotropic_for_every_builder():
    metrics = [build_walker3("x1*x2"), build_walker4("x1", "x2", "x3*x4"),
               build_walker_general(2, [["1"]], [["x1"], ["0"]], [["x5", "0"], ["0", "x1"]])]
    for g in metrics:
        D = Distribution.coordinate(g.chart, g.spec.distribution_indices)
        assert is_totally_isotropic(D, g).value


def test_chart_requires_unique_names():
    with pytest.raises(ValueError):
        Chart(("x1", "x1"))
