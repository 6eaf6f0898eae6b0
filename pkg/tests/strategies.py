"""Hypothesis strategies and sympy oracles shared by the test modules."""
from __future__ import annotations

from fractions import Fraction

import sympy
from hypothesis import strategies as st

from dlalg.algebroid import Section
from dlalg.exactpoly import Polynomial

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


def exponents(dim: int, max_deg: int = 3):
    return st.tuples(*[st.integers(0, max_deg) for _ in range(dim)])


def polynomials(dim: int = 2, max_terms: int = 4, max_deg: int = 3):
    return st.dictionaries(exponents(dim, max_deg), rationals, max_size=max_terms).map(
        lambda terms: Polynomial(terms, dim))


def sections(rank: int, dim: int, max_terms: int = 2, max_deg: int = 1):
    return st.lists(polynomials(dim, max_terms, max_deg), min_size=rank, max_size=rank).map(
        lambda comps: Section(comps, dim))


def symbols(dim: int):
    return sympy.symbols(f"x0:{dim}") if dim else ()


def to_sympy(p: Polynomial, syms=None):
    syms = syms if syms is not None else symbols(p.dim)
    expr = sympy.Integer(0)
    for exps, c in p.terms:
        mono = sympy.Integer(1)
        for s, e in zip(syms, exps):
            mono *= s ** e
        expr += sympy.Rational(c.numerator, c.denominator) * mono
    return sympy.expand(expr)


def from_sympy(expr, dim: int) -> Polynomial:
    syms = symbols(dim)
    poly = sympy.Poly(sympy.expand(expr), *syms) if dim else None
    if poly is None:
        val = sympy.Rational(expr)
        return Polynomial.constant(Fraction(int(val.p), int(val.q)), 0)
    terms = {}
    for exps, c in poly.terms():
        c = sympy.Rational(c)
        terms[tuple(exps)] = Fraction(int(c.p), int(c.q))
    return Polynomial(terms, dim)
