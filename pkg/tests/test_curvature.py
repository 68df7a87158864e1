import random

import numpy as np
import pytest

from oracles import numeric_christoffel, numeric_riemann, random_points, random_polynomial
from walker import (Distribution, Geometry, build_walker3, build_walker4, build_walker_general,
                    christoffel, invariants, ricci, ricci_from_connection, ricci_kernel_check, riemann)
from walker.symexpr import differentiate as d, evaluate, from_rat, parse


def tensor_at(t, point, shape):
    out = np.zeros(shape)
    for idx, r in t.entries():
        out[idx] = evaluate(from_rat(r), point)
    return out


def sample_metrics():
    rnd = random.Random(2024)
    x3 = ["x1", "x2", "x3"]
    x4 = ["x1", "x2", "x3", "x4"]
    yield build_walker3(random_polynomial(rnd, x3), 1)
    yield build_walker3(random_polynomial(rnd, x3) + " + sin(x2)", -1)
    yield build_walker4(random_polynomial(rnd, x4, 2, 3), random_polynomial(rnd, x4, 2, 3),
                        random_polynomial(rnd, x4, 2, 2))
    yield build_walker_general(1, [["1", "0"], ["0", "-1"]], [["x2", "x1*x3"]], [["x1*x4 + x3^2"]])


METRICS = list(sample_metrics())
IDS = ["walker3+", "walker3-", "walker4", "general5"]


@pytest.mark.parametrize("g", METRICS, ids=IDS)
def test_christoffel_matches_finite_differences(g):
    gamma = christoffel(g)
    n = g.n
    for p in random_points(np.random.default_rng(1), g.chart.names, 5):
        expected = numeric_christoffel(g.at, p, g.chart.names)
        assert np.allclose(tensor_at(gamma, p, (n,) * 3), expected, atol=1e-5)


@pytest.mark.parametrize("g", METRICS, ids=IDS)
def test_riemann_matches_finite_differences(g):
    R = riemann(christoffel(g))
    n = g.n
    for p in random_points(np.random.default_rng(2), g.chart.names, 3):
        expected = numeric_riemann(g.at, p, g.chart.names)
        assert np.allclose(tensor_at(R, p, (n,) * 4), expected, atol=1e-5)


@pytest.mark.parametrize("g", METRICS, ids=IDS)
def test_riemann_symmetries(g):
    n = g.n
    R = riemann(christoffel(g))
    for p in random_points(np.random.default_rng(3), g.chart.names, 3):
        r = tensor_at(R, p, (n,) * 4)
        lowered = np.einsum("ml,lkij->mkij", g.at(p), r)
        assert np.allclose(r, -r.transpose(0, 1, 3, 2), atol=1e-9)
        # metric compatibility makes the lowered tensor skew in its first pair
        assert np.allclose(lowered, -lowered.transpose(1, 0, 2, 3), atol=1e-9)
        assert np.allclose(lowered, lowered.transpose(2, 3, 0, 1), atol=1e-9)
        bianchi = r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2)
        assert np.allclose(bianchi, 0, atol=1e-9)


@pytest.mark.parametrize("g", METRICS, ids=IDS)
def test_ricci_shortcut_agrees_with_contraction(g):
    gamma = christoffel(g)
    full = ricci(riemann(gamma))
    short = ricci_from_connection(gamma)
    for idx, r in full.entries():
        assert (r - short.rat(*idx)).is_zero()


@pytest.mark.parametrize("g", METRICS, ids=IDS)
def test_connection_is_metric_compatible(g):
    n = g.n
    gamma = christoffel(g)
    for p in random_points(np.random.default_rng(4), g.chart.names, 3):
        G = tensor_at(gamma, p, (n,) * 3)
        gp = g.at(p)
        dg = np.array([(g.at({**p, a: p[a] + 1e-5}) - g.at({**p, a: p[a] - 1e-5})) / 2e-5
                       for a in g.chart.names])
        # d_k g_ij = g(nabla_k d_i, d_j) + g(d_i, nabla_k d_j)
        rhs = np.einsum("mki,mj->kij", G, gp) + np.einsum("mkj,im->kij", G, gp)
        assert np.allclose(dg, rhs, atol=1e-6)


def test_walker3_christoffel_closed_form():
    names = ("x1", "x2", "x3")
    for eps in (1, -1):
        g = build_walker3("x1^2*x3 + x2^3 - x1*x2", eps)
        G = christoffel(g)
        f = parse("x1^2*x3 + x2^3 - x1*x2", names)
        f1, f2, f3 = (d(f, n) for n in names)
        expected = {
            (0, 2, 2): (f * f1 + f3) / 2,
            (1, 2, 2): -eps * f2 / 2,
            (2, 2, 2): -f1 / 2,
            (0, 0, 2): f1 / 2,
            (0, 1, 2): f2 / 2,
        }
        for p in random_points(np.random.default_rng(5), names, 10):
            for (k, i, j), e in expected.items():
                assert evaluate(G[k, i, j], p) == pytest.approx(evaluate(e, p), abs=1e-12)
                assert evaluate(G[k, j, i], p) == pytest.approx(evaluate(e, p), abs=1e-12)
        listed = {(k, *sorted((i, j))) for k, i, j in expected}
        for (k, i, j), r in G.entries():
            if (k, *sorted((i, j))) not in listed:
                assert r.is_zero()


def test_flat_metrics_have_zero_curvature():
    for g in (build_walker3("0"), build_walker3("x1 + x2"), build_walker4("x1", "x2", "0")):
        geo = Geometry(g)
        assert geo.riemann.is_zero().value
        assert str(geo.scalar) == "0"


def test_nonflat_walker3_has_nonzero_ricci():
    geo = Geometry(build_walker3("x2^2"))
    assert not geo.riemann.is_zero().value
    v = geo.ricci.is_zero()
    assert not v.value and "nonzero" in v.detail


def test_walker3_scalar_curvature_is_second_derivative_along_distribution():
    names = ("x1", "x2", "x3")
    f = "x1^2*x2 + x3*x2^2 + sin(x1)*x3"
    for eps in (1, -1):
        g = build_walker3(f, eps)
        scal = Geometry(g).scalar
        f11 = parse("2*x2 - sin(x1)*x3", names)
        for p in random_points(np.random.default_rng(7), names, 5):
            r = numeric_riemann(g.at, p, names)
            fd = np.einsum("ij,kikj->", np.linalg.inv(g.at(p)), r)
            assert evaluate(scal, p) == pytest.approx(evaluate(f11, p), abs=1e-12)
            assert fd == pytest.approx(evaluate(f11, p), abs=1e-4)


def test_invariants_match_numeric_contractions():
    g = METRICS[2]
    inv = invariants(g)
    n = g.n
    R = riemann(christoffel(g))
    ric = ricci(R)
    for p in random_points(np.random.default_rng(6), g.chart.names, 3):
        gp = g.at(p)
        gi = np.linalg.inv(gp)
        r = tensor_at(R, p, (n,) * 4)
        rc = tensor_at(ric, p, (n, n))
        lowered = np.einsum("ml,lkij->mkij", gp, r)
        up = np.einsum("ma,kb,ic,jd,abcd->mkij", gi, gi, gi, gi, lowered)
        assert evaluate(inv.kretschmann, p) == pytest.approx(np.sum(lowered * up), abs=1e-8)
        assert evaluate(inv.ric_squared, p) == pytest.approx(
            np.einsum("ij,ia,jb,ab->", rc, gi, gi, rc), abs=1e-8)
        assert evaluate(inv.scal, p) == pytest.approx(np.sum(gi * rc), abs=1e-8)


def test_ricci_kernel_check_reports_failing_component():
    g = build_walker3("3*x1^2 + x2")
    D = Distribution.coordinate(g.chart, [0])
    v = ricci_kernel_check(g, D)
    assert not v.value and "Ric(X1" in v.detail
    assert ricci_kernel_check(build_walker3("x2^2"), Distribution.coordinate(g.chart, [0])).value
