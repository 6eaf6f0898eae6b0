from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dlalg import fixtures as F
from dlalg.algebroid import (
    Algebroid,
    BundleMap,
    Chart,
    Connection,
    HomValuedForm,
    Section,
    curvature,
    jacobiator,
    koszul_d,
    pointwise_rank,
    surjectivity_certificate,
    validate_algebroid,
    validate_algebroid_morphism,
)
from dlalg.errors import InputError
from dlalg.exactpoly import Polynomial
from strategies import from_sympy, polynomials, sections, symbols, to_sympy

PLANE = Chart(2, ("x", "y"))
X, Y = PLANE.var("x"), PLANE.var("y")

# Action algebroid of the vector fields d/dx, x d/dy, d/dy on the plane.
ACTION = Algebroid("act", PLANE, 3, [[1, 0, 0], [0, X, 1]], {(0, 1): [0, 0, 1]}, ("e1", "e2", "e3"))
ACTION_FIELDS = [(1, 0), (0, sympy.Symbol("x0")), (0, 1)]


def _field_apply(field, f, syms):
    return sum(c * sympy.diff(f, s) for c, s in zip(field, syms))


def _sym_anchor(sec: Section):
    syms = symbols(2)
    comps = [to_sympy(c, syms) for c in sec.comps]
    return tuple(sympy.expand(sum(comps[i] * ACTION_FIELDS[i][u] for i in range(3))) for u in range(2))


def test_fixture_algebroids_are_valid():
    for alg in (F.heis(), F.aff(), F.aff_pair(), F.tline_algebroid(), ACTION):
        assert validate_algebroid(alg).ok, alg.name


def test_bad3_jacobi_counterexample():
    r = validate_algebroid(F.bad3())
    (fail,) = r.failures
    assert fail.check_id == "algebroid.jacobi"
    assert fail.counterexample == ("e1", "e2", "e3")
    alg = F.bad3()
    e1, e2, e3 = alg.frame()
    assert jacobiator(alg, e1, e2, e3) == -e1


def test_bad_anchor_is_caught():
    # d/dx and d/dy with [e1, e2] = e1 cannot be an anchored bracket
    bad = Algebroid("bad", PLANE, 2, [[1, 0], [0, 1]], {(0, 1): [1, 0]})
    assert validate_algebroid(bad).status_of("algebroid.anchor") == "fail"


def test_structure_guards():
    with pytest.raises(InputError):
        Algebroid("a", PLANE, 2, [[1, 0]], {})
    with pytest.raises(InputError):
        Algebroid("a", PLANE, 2, None, {(1, 0): [1, 0]})


def test_heis_bracket():
    h = F.heis()
    x, y, z = h.frame()
    assert h.bracket(x, y) == z
    assert h.bracket(y, x) == -z
    assert h.bracket(x, z).is_zero()


@settings(max_examples=30, deadline=None)
@given(sections(3, 2), sections(3, 2))
def test_anchor_is_bracket_preserving_against_sympy(s1, s2):
    """rho[s1, s2] equals the commutator of the vector fields rho(s1), rho(s2)."""
    syms = symbols(2)
    v, w = _sym_anchor(s1), _sym_anchor(s2)
    commutator = tuple(sympy.expand(_field_apply(v, w[u], syms) - _field_apply(w, v[u], syms)) for u in range(2))
    assert _sym_anchor(ACTION.bracket(s1, s2)) == commutator


@settings(max_examples=30, deadline=None)
@given(sections(3, 2), sections(3, 2), polynomials(2, 3, 2))
def test_bracket_leibniz(s1, s2, f):
    lhs = ACTION.bracket(s1, s2.times(f))
    rhs = ACTION.bracket(s1, s2).times(f) + s2.times(ACTION.anchor_apply(s1, f))
    assert lhs == rhs


@settings(max_examples=15, deadline=None)
@given(sections(3, 2), sections(3, 2), sections(3, 2))
def test_jacobi_on_random_sections(a, b, c):
    assert jacobiator(ACTION, a, b, c).is_zero()


def test_morphisms():
    delta, C, A = F.comma_input("heis")
    assert validate_algebroid_morphism(delta, C, A).ok
    bad = BundleMap([[0, 0, 1], [0, 0, 0]], 3, 2, 0)  # z -> a1 breaks [x, y] = z
    r = validate_algebroid_morphism(bad, C, A)
    assert r.get("morphism.bracket").counterexample == ("x", "y")
    tl = F.tline_algebroid()
    assert validate_algebroid_morphism(BundleMap.identity(1, 1), tl, tl).ok
    assert validate_algebroid_morphism(BundleMap([[2]], 1, 1, 1), tl, tl).status_of("morphism.anchor") == "fail"


def test_bundle_map_algebra():
    m = BundleMap([[1, 2], [0, X]], 2, 2, 2)
    n = BundleMap([[0, 1], [1, 0]], 2, 2, 2)
    assert m.compose(n) == BundleMap([[2, 1], [X, 0]], 2, 2, 2)
    assert m.transpose() == BundleMap([[1, 0], [2, X]], 2, 2, 2)
    assert (m - m).is_zero()
    assert not m.is_constant() and n.is_constant()
    assert m.evaluate([3, 0]) == [[1, 2], [0, 3]]


def test_surjectivity_certificates():
    ok, kind, ranks = surjectivity_certificate(BundleMap([[1, 0]], 2, 1, 0))
    assert (ok, kind, ranks) == (True, "constant-matrix", [1])
    t = F.LINE.var(0)
    ok, kind, ranks = surjectivity_certificate(BundleMap([[t]], 1, 1, 1))
    assert (ok, kind) == (False, "sampled") and ranks == [0, 1]
    ok, _, _ = surjectivity_certificate(BundleMap([[t + 1]], 1, 1, 1), [(Fraction(2),), (Fraction(5),)])
    assert ok
    r = pointwise_rank(BundleMap([[t]], 1, 1, 1), [(1,), (0,)])
    assert r.get("rank.surjective").counterexample == ("0",)


def test_curvfix_curvature_is_one():
    t2 = F.curvfix()
    R = curvature(t2.conn0)
    assert R.value((0, 1)) == BundleMap.identity(1, 1)


def test_curvfix_curvature_by_sympy():
    """Commutator of the two covariant derivatives acting on f u, with d/dt anchoring e1."""
    tt = sympy.Symbol("x0")
    f = sympy.Function("f")(tt)
    nabla1 = lambda g: sympy.diff(g, tt)  # noqa: E731
    nabla2 = lambda g: tt * g  # noqa: E731
    assert sympy.simplify(nabla1(nabla2(f)) - nabla2(nabla1(f)) - f) == 0


def test_form_antisymmetry_and_guards():
    A = F.heis()
    m = BundleMap([[1]], 1, 1, 0)
    w = HomValuedForm(A, 2, 1, 1, {(1, 0): m})
    assert w.value((0, 1)) == -m
    assert w.value((1, 1)).is_zero()
    with pytest.raises(InputError):
        HomValuedForm(A, 2, 1, 1, {(0, 1): m, (1, 0): m})
    with pytest.raises(InputError):
        HomValuedForm(A, 2, 1, 1, {(0, 0): m})


def _random_connection(seed, A, n):
    import random
    return F.random_connection(random.Random(seed), A, n)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), sections(3, 2), sections(3, 2), polynomials(2, 2, 1))
def test_curvature_is_tensorial(seed, s1, s2, f):
    nabla = _random_connection(seed, ACTION, 2)
    R = curvature(nabla)
    assert R.evaluate([s1.times(f), s2]) == R.evaluate([s1, s2]).times(f)
    assert R.evaluate([s1, s2]) == -R.evaluate([s2, s1])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), sections(3, 2), sections(3, 2), sections(2, 2))
def test_curvature_matches_commutator(seed, s1, s2, e):
    nabla = _random_connection(seed, ACTION, 2)
    lhs = curvature(nabla).apply([s1, s2], e)
    rhs = nabla.apply(s1, nabla.apply(s2, e)) - nabla.apply(s2, nabla.apply(s1, e)) \
        - nabla.apply(ACTION.bracket(s1, s2), e)
    assert lhs == rhs


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), sections(2, 2), polynomials(2, 2, 1))
def test_connection_leibniz(seed, e, f):
    nabla = _random_connection(seed, ACTION, 2)
    a = ACTION.basis(1)
    assert nabla.apply(a, e.times(f)) == nabla.apply(a, e).times(f) + e.times(ACTION.anchor_apply(a, f))


@settings(max_examples=10, deadline=None)
@given(st.lists(st.fractions(-3, 3, max_denominator=3), min_size=6, max_size=6),
       st.lists(st.fractions(-3, 3, max_denominator=3), min_size=6, max_size=6))
def test_d_squared_vanishes_for_flat_connections(diag, vals):
    """Diagonal constant Christoffel matrices on an abelian algebra are flat, so d o d = 0."""
    A = Algebroid("ab3", F.POINT, 3, None, {})
    gam = [[[diag[2 * i] if j == k == 0 else diag[2 * i + 1] if j == k == 1 else 0 for k in range(2)]
            for j in range(2)] for i in range(3)]
    nabla = Connection(A, 2, gam)
    assert curvature(nabla).is_zero()
    w = HomValuedForm(A, 1, 2, 2, {(i,): BundleMap([[vals[2 * i], 0], [0, vals[2 * i + 1]]], 2, 2, 0)
                                   for i in range(3)})
    assert koszul_d((nabla, nabla), koszul_d((nabla, nabla), w)).is_zero()


def test_d_squared_is_curvature_on_heis():
    """On a nonabelian algebra d^2 of a 0-form is the curvature action: d d psi = R o psi - psi o R."""
    import random
    A = F.heis()
    rng = random.Random(5)
    n0 = F.random_connection(rng, A, 2, degree=0)
    n1 = F.random_connection(rng, A, 1, degree=0)
    psi = HomValuedForm(A, 0, 1, 2, {(): BundleMap([[1], [2]], 1, 2, 0)})
    dd = koszul_d((n0, n1), koszul_d((n0, n1), psi))
    R0, R1 = curvature(n0), curvature(n1)
    expected = R0.precompose(psi.value(())) - R1.postcompose(psi.value(()))
    assert dd == expected


def test_polynomial_sections_format():
    s = Section([X, 0, Polynomial.constant(2, 2)], 2)
    assert s.format(("e1", "e2", "e3"), ("x", "y")) == "x*e1 + 2*e3"
    assert from_sympy(to_sympy(X * Y), 2) == X * Y
