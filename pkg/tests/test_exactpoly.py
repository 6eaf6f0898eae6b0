from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dlalg.errors import InputError
from dlalg.exactpoly import Polynomial, as_rational, poly_arith, poly_eval, poly_partial
from strategies import from_sympy, polynomials, rationals, symbols, to_sympy

t = Polynomial.variable(0, 1)
x, y = Polynomial.variable(0, 2), Polynomial.variable(1, 2)


def test_small_examples():
    assert poly_arith("add", t, 1) == t + Polynomial.one(1)
    assert poly_arith("mul", t + 1, t - 1) == t ** 2 - 1
    assert poly_arith("scale", 2 * t, Fraction(1, 2)) == t
    assert poly_partial(t ** 2, 0) == 2 * t
    assert poly_partial(Polynomial.one(1), 0).is_zero()
    assert poly_partial(x * y + y ** 2, 0) == y
    assert poly_eval(t ** 2 - 1, [2]) == 3


def test_zero_terms_are_dropped():
    p = Polynomial({(1,): 2, (0,): 0}, 1)
    assert p.terms == [((1,), Fraction(2))]
    assert (t - t).is_zero() and (t - t).terms == []


def test_canonical_order_is_graded_descending():
    p = 1 + x + y ** 2 + x * y
    assert [e for e, _ in p.terms] == [(1, 1), (0, 2), (1, 0), (0, 0)]


def test_dimension_mismatch():
    with pytest.raises(InputError):
        x + t
    with pytest.raises(InputError):
        t.evaluate([1, 2])
    with pytest.raises(InputError):
        t.partial(1)


def test_point_chart():
    c = Polynomial.constant(Fraction(3, 4), 0)
    assert c.is_constant() and c.constant_value() == Fraction(3, 4)
    assert c.evaluate([]) == Fraction(3, 4)
    assert (c * c).constant_value() == Fraction(9, 16)


def test_as_rational():
    assert as_rational("-3/6") == Fraction(-1, 2)
    with pytest.raises(InputError):
        as_rational("1/0")
    with pytest.raises(InputError):
        as_rational(True)


def test_json_round_trip_and_guards():
    p = Fraction(1, 3) * x ** 2 - y + 5
    assert Polynomial.from_json(p.to_json(), 2) == p
    assert p.to_json()[0] == {"coeff": "1/3", "exps": [2, 0]}
    with pytest.raises(InputError):
        Polynomial.from_json([{"coeff": "1", "exps": [1, 0]}, {"coeff": "2", "exps": [1, 0]}], 2)
    with pytest.raises(InputError):
        Polynomial.from_json([{"coeff": "1"}], 2)
    with pytest.raises(InputError):
        Polynomial.from_json([{"coeff": "1", "exps": [1]}], 2)


def test_format():
    assert (x ** 2 - 3 * y + 1).format(["x", "y"]) == "x^2 - 3*y + 1"
    assert Polynomial.zero(2).format() == "0"


# sympy is the oracle for products, derivatives and evaluation

@settings(max_examples=60, deadline=None)
@given(polynomials(), polynomials())
def test_product_matches_sympy(p, q):
    assert to_sympy(p * q) == sympy.expand(to_sympy(p) * to_sympy(q))


@settings(max_examples=60, deadline=None)
@given(polynomials(), st.integers(0, 1))
def test_partial_matches_sympy(p, i):
    syms = symbols(2)
    assert p.partial(i) == from_sympy(sympy.diff(to_sympy(p), syms[i]), 2)


@settings(max_examples=60, deadline=None)
@given(polynomials(), rationals, rationals)
def test_evaluation_matches_sympy(p, a, b):
    syms = symbols(2)
    val = to_sympy(p).subs({syms[0]: sympy.Rational(a.numerator, a.denominator),
                            syms[1]: sympy.Rational(b.numerator, b.denominator)})
    assert p.evaluate([a, b]) == Fraction(int(val.p), int(val.q))


# ring laws and Leibniz

@settings(max_examples=40, deadline=None)
@given(polynomials(), polynomials(), polynomials())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == Polynomial.zero(2)
    assert p * Polynomial.one(2) == p


@settings(max_examples=40, deadline=None)
@given(polynomials(), polynomials(), st.integers(0, 1))
def test_leibniz(p, q, i):
    assert (p * q).partial(i) == p.partial(i) * q + p * q.partial(i)


@settings(max_examples=40, deadline=None)
@given(polynomials())
def test_equal_polynomials_hash_equal(p):
    q = Polynomial(dict(p.terms), 2)
    assert p == q and hash(p) == hash(q)
