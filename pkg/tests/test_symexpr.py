import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import central_difference, random_points, random_polynomial
from walker.errors import DomainError, ParseError, UnknownIdentifierError
from walker.symexpr import (Const, Func, Neg, Pow, Product, Quotient, Sum, Var, compile_expr,
                            differentiate, evaluate, free_variables, is_zero, parse, simplify,
                            substitute, to_rat, zero_tolerance)
from walker.verdict import Confidence

CHART = ("x1", "x2", "x3")


# parsing --------------------------------------------------------------------

def test_parse_sum_of_power_and_function():
    e = parse("x1^2 + sin(x2)", CHART)
    assert e == Sum((Pow(Var("x1"), 2), Func("sin", Var("x2"))))


def test_parse_zero_is_exact_constant():
    e = parse("0", CHART)
    assert e == Const(0)
    assert isinstance(e.value, Fraction)


def test_decimal_literals_are_exact():
    assert parse("0.1", CHART) == Const(Fraction(1, 10))


@pytest.mark.parametrize("text, offset", [("x1 +", 4), ("(x1", 3), ("x1 * * x2", 5), ("x1^x2", 3)])
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(ParseError) as info:
        parse(text, CHART)
    assert info.value.position == offset
    assert f"offset {offset}" in str(info.value)


def test_unknown_identifier_is_named():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("x1 + y7", CHART)
    assert "y7" in str(info.value)


def test_unknown_function_is_rejected():
    with pytest.raises(UnknownIdentifierError):
        parse("tan(x1)", CHART)


def test_zero_exponent_is_rejected():
    with pytest.raises(ParseError):
        parse("x1^0", CHART)


def test_unary_minus_binds_tighter_than_power():
    # the grammar puts '-' inside base, so -x1^2 is (-x1)^2
    assert evaluate(parse("-x1^2", CHART), {"x1": 3.0}) == 9.0
    assert evaluate(parse("-(x1^2)", CHART), {"x1": 3.0}) == -9.0


# hypothesis corpus ----------------------------------------------------------

leaves = st.one_of(
    st.sampled_from([Var(n) for n in CHART]),
    st.fractions(min_value=-5, max_value=5, max_denominator=4).map(Const),
)


def _extend(children):
    return st.one_of(
        st.lists(children, min_size=2, max_size=3).map(lambda xs: Sum(tuple(xs))),
        st.lists(children, min_size=2, max_size=3).map(lambda xs: Product(tuple(xs))),
        st.tuples(children, st.integers(1, 3)).map(lambda t: Pow(*t)),
        children.map(Neg),
        st.tuples(children, st.sampled_from(["sin", "cos", "exp"])).map(lambda t: Func(t[1], t[0])),
        st.tuples(children, st.sampled_from([Var("x1"), Const(2), Sum((Var("x2"), Const(3)))]))
          .map(lambda t: Quotient(*t)),
    )


exprs = st.recursive(leaves, _extend, max_leaves=8)
fast = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@fast
@given(exprs)
def test_print_parse_round_trip_on_simplified_forms(e):
    s = simplify(e)
    assert parse(str(s), CHART) == s


@fast
@given(exprs)
def test_print_parse_preserves_meaning_of_raw_trees(e):
    assert simplify(parse(str(e), CHART)) == simplify(e)


@fast
@given(exprs)
def test_simplify_is_idempotent(e):
    s = simplify(e)
    assert simplify(s) == s


@fast
@given(exprs)
def test_simplify_preserves_value(e):
    point = {"x1": 0.37, "x2": -0.61, "x3": 1.13}
    try:
        raw = evaluate(e, point)
    except (DomainError, OverflowError):
        return
    assert evaluate(simplify(e), point) == pytest.approx(raw, rel=1e-9, abs=1e-9)


@fast
@given(exprs, st.sampled_from(CHART))
def test_derivative_matches_central_differences(e, name):
    rng = np.random.default_rng(7)
    d = differentiate(e, name)
    f = compile_expr(e, CHART)
    df = compile_expr(d, CHART)
    for p in random_points(rng, CHART, 5):
        try:
            exact = df(*p.values())
            approx = central_difference(lambda q: f(*q.values()), p, name)
        except (DomainError, ZeroDivisionError, OverflowError, ValueError):
            continue
        if not (math.isfinite(exact) and math.isfinite(approx)) or abs(exact) > 1e6:
            continue
        assert approx == pytest.approx(exact, rel=1e-6, abs=1e-6)


# differentiation --------------------------------------------------------------

@pytest.mark.parametrize("text, var, expected", [
    ("x1^2", "x1", "2*x1"),
    ("sin(x2)", "x2", "cos(x2)"),
    ("x1^2*x3 + x2", "x1", "2*x1*x3"),
    ("7", "x1", "0"),
])
def test_differentiate_examples(text, var, expected):
    assert str(differentiate(parse(text, CHART), var)) == expected


def test_derivative_of_polynomial_agrees_with_finite_differences_at_50_points():
    rng = np.random.default_rng(3)
    e = parse("x1^2*x3 + x2", CHART)
    d = differentiate(e, "x1")
    for p in random_points(rng, CHART, 50):
        approx = central_difference(lambda q: evaluate(e, q), p, "x1")
        assert approx == pytest.approx(evaluate(d, p), rel=1e-6, abs=1e-8)


def test_quotient_and_log_rules():
    e = parse("log(x1)/x2", CHART)
    d = differentiate(e, "x1")
    assert is_zero(d - parse("1/(x1*x2)", CHART)).value


# evaluation -------------------------------------------------------------------

def test_evaluate_examples():
    assert evaluate(parse("x1^2", CHART), {"x1": 3}) == 9
    assert evaluate(parse("exp(x1)*x2", CHART), {"x1": 0, "x2": 5}) == 5


def test_division_by_zero_names_subexpression():
    with pytest.raises(DomainError) as info:
        evaluate(parse("x2 + 1/x1", CHART), {"x1": 0, "x2": 1})
    assert "1/x1" in str(info.value)


def test_log_of_negative_is_a_domain_error():
    with pytest.raises(DomainError):
        evaluate(parse("log(x1)", CHART), {"x1": -1})


def test_substitute_then_evaluate():
    e = parse("x1*x2 + x3", CHART)
    s = substitute(e, {"x1": Const(2), "x3": parse("x2^2", CHART)})
    assert free_variables(s) == {"x2"}
    assert evaluate(s, {"x2": 3.0}) == 15.0


# zero testing -------------------------------------------------------------------

def test_exact_cancellation():
    v = is_zero(parse("x1 - x1", CHART))
    assert v.value and v.confidence is Confidence.EXACT


def test_trigonometric_identity_is_probabilistic():
    v = is_zero(parse("sin(x1)^2 + cos(x1)^2 - 1", CHART))
    assert v.value and v.confidence is Confidence.PROBABILISTIC


def test_nonzero_polynomial_gets_witness():
    v = is_zero(parse("x1*x2", CHART))
    assert not v.value and v.confidence is Confidence.EXACT
    assert v.witness == {"x1": 1, "x2": 1}


def test_witness_avoids_roots():
    v = is_zero(parse("x1 - 1", CHART))
    assert not v.value
    assert v.witness["x1"] != 1


def test_polynomial_decisions_never_sample():
    rnd = random.Random(11)
    for _ in range(30):
        p = parse(random_polynomial(rnd, list(CHART)), CHART)
        v = is_zero(p - p)
        assert v.confidence is Confidence.EXACT and v.value


def test_tolerance_context():
    e = parse("sin(x1)^2 + cos(x1)^2 - 1 + 1/1000000", CHART)
    assert not is_zero(e).value
    with zero_tolerance(1e-3):
        assert is_zero(e).value
    assert not is_zero(e).value


def test_rational_function_normal_form():
    r = to_rat(parse("(x1^2 - 1)/(x1 - 1) - x1 - 1", CHART))
    assert r.is_zero()
