import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from _exprgen import random_expr
from superosc.numkit import ParseError, diff_expr, fd_derivative, parse_expr
from superosc.numkit.expr import const, exp, polynomial_identity, substitute, sym


def test_basic_parse_and_evaluate():
    e = parse_expr("2*x^3 - x/(1 + y^2) + exp(-x)")
    v = e.evaluate(x=0.5, y=2.0)
    assert math.isclose(v, 2 * 0.125 - 0.5 / 5 + math.exp(-0.5))


def test_rational_exponents_and_precedence():
    assert parse_expr("-x^2").evaluate(x=3) == -9
    assert parse_expr("2^3^2").evaluate() == 64  # left-associative
    assert math.isclose(parse_expr("y^(-2/3)").evaluate(y=8.0), 0.25)
    assert parse_expr("x^(1/2)").evaluate(x=Fraction(9, 4)) == 1.5


def test_exact_arithmetic_on_fractions():
    e = parse_expr("(1/3)*x^2 + 2/x")
    assert e.evaluate(x=Fraction(3)) == Fraction(3) + Fraction(2, 3)


@pytest.mark.parametrize("text, pos", [("x^^2", 2), ("(x + 1", 6), ("sin(x)", 0), ("x^1.5", 2),
                                       ("x^(1/0)", 5), ("", 0), ("exp", 0)])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.position == pos


def test_derivative_rules():
    x = sym("x")
    assert diff_expr(x ** 3, "x").evaluate(x=2) == 12
    e = exp(2 * x) * x ** Fraction(1, 2)
    d = diff_expr(e, "x")
    want = math.exp(2) * (2 * 1 + 0.5)
    assert math.isclose(d.evaluate(x=1.0), want)
    assert str(diff_expr(const(5), "x")) == "0"


def test_round_trip_and_fd_on_random_expressions():
    rng = np.random.default_rng(123)
    for _ in range(100):
        text = random_expr(rng, 3)
        e = parse_expr(text)
        again = parse_expr(str(e))
        x, y = rng.uniform(0.5, 1.5, 2)
        v = float(e.evaluate(x=x, y=y))
        assert abs(float(again.evaluate(x=x, y=y)) - v) <= 1e-12 * max(1.0, abs(v)), text
        exact = float(diff_expr(e, "y").evaluate(x=x, y=y))
        fd = fd_derivative(lambda t: float(e.evaluate(x=x, y=t)), y, 1, 1e-5)
        assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact)), text


@settings(max_examples=60, deadline=None)
@given(p=st.integers(-4, 4), q=st.integers(1, 5), c=st.fractions(-5, 5, max_denominator=7))
def test_power_rule_property(p, q, c):
    k = Fraction(p, q)
    e = c * sym("y") ** k
    d = diff_expr(e, "y")
    assert math.isclose(float(d.evaluate(y=1.7)), float(c * k) * 1.7 ** float(k - 1),
                        rel_tol=1e-12, abs_tol=1e-15)


def test_to_callable_and_free_symbols():
    e = parse_expr("x*y + exp(x)")
    assert e.free_symbols == frozenset({"x", "y"})
    fn = e.to_callable("x", "y")
    assert math.isclose(fn(1.0, 2.0), 2 + math.e)


def test_substitute_and_polynomial_identity():
    w = sym("w")
    g = w ** 2 - 3 * w
    shifted = substitute(g, "w", w + 1)
    assert polynomial_identity(shifted, w ** 2 - w - 2, "w", 2)
    assert not polynomial_identity(shifted, w ** 2 - w, "w", 2)
    with pytest.raises(ValueError):
        polynomial_identity(w * 0.5, w, "w", 1)


def test_missing_symbol_raises():
    with pytest.raises(KeyError):
        parse_expr("x + z").evaluate(x=1.0)
