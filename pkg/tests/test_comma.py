from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dlalg import fixtures as F
from dlalg.algebroid import Algebroid, BundleMap, Connection, Section
from dlalg.comma import build_comma, build_comma_morphism, check_pi_flat, del_connections
from dlalg.errors import InputError, RefusalError
from dlalg.matched import validate_matched_pair


def test_heis_zero_connection_gives_bracket():
    delta, C, A = F.comma_input("heis")
    on_c, on_a, r_del = del_connections(delta, C, A, Connection.zero(A, 3))
    fc = C.frame()
    for c, d in itertools.product(fc, fc):
        assert on_c.apply(c, d) == C.bracket(c, d)
    for idx in itertools.combinations(range(3), 2):
        assert r_del.value(idx) == BundleMap.zero(2, 3, 0)


def test_tline_trivial_connection():
    delta, C, A = F.comma_input("tline")
    flat = Connection.zero(A, 1)  # zero Christoffel symbols: nabla_X u = X(u)
    s = build_comma(delta, C, A, flat)
    assert validate_matched_pair(s).ok
    t = F.LINE.var(0)
    c, d = Section([t], 1), Section([t * t], 1)
    # nabla^del_c d = [c, d] + nabla_d c = t^2 + t^2
    assert s.trepB.conn0.apply(c, d) == C.bracket(c, d) + flat.apply(d, c) == Section([2 * t * t], 1)
    assert s.trepB.curv.evaluate([c, d]) == BundleMap.zero(1, 1, 1)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(F.COMMA_FIXTURES), st.integers(0, 10**6))
def test_random_connections_give_matched_pairs(name, seed):
    delta, C, A = F.comma_input(name)
    nabla = F.random_connection(random.Random(seed), A, C.rank)
    r = validate_matched_pair(build_comma(delta, C, A, nabla))
    assert r.ok, r.to_text()


def _abelian(name, rank):
    return Algebroid(name, F.POINT, rank, None, {}, tuple(f"{name.lower()}{k + 1}" for k in range(rank)))


small = st.integers(-3, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_abelian_comma_against_matrix_oracle(n, p, data):
    """For abelian C, A over a point the induced data reduce to matrix products."""
    D = sympy.Matrix(p, n, lambda *_: data.draw(small))
    N = [sympy.Matrix(n, n, lambda *_: data.draw(small)) for _ in range(p)]
    C, A = _abelian("C", n), _abelian("A", p)
    delta = BundleMap([[int(x) for x in row] for row in D.tolist()], n, p, 0)
    nabla = Connection(A, n, [[[int(x) for x in N[i][:, j]] for j in range(n)] for i in range(p)])
    on_c, on_a, r_del = del_connections(delta, C, A, nabla)

    def nab(a, c):
        return sum((a[i] * N[i] * c for i in range(p)), sympy.zeros(n, 1))

    def vec(s: Section):
        return sympy.Matrix([sympy.Rational(x.constant_value()) for x in s.comps])

    E = sympy.eye(n)
    Ea = sympy.eye(p)
    for j, k in itertools.product(range(n), range(n)):
        assert vec(on_c.on_basis(j, C.basis(k))) == nab(D * E[:, k], E[:, j])
    for j, k in itertools.product(range(n), range(p)):
        assert vec(on_a.on_basis(j, A.basis(k))) == D * nab(Ea[:, k], E[:, j])
    for j, k in itertools.combinations(range(n), 2):
        for m in range(p):
            a = Ea[:, m]
            expected = nab(D * nab(a, E[:, k]), E[:, j]) - nab(D * nab(a, E[:, j]), E[:, k])
            assert vec(r_del.value((j, k)).column(m)) == expected


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6))
def test_r_del_is_antisymmetric(seed):
    delta, C, A = F.comma_input("pair-aff")
    _, _, r_del = del_connections(delta, C, A, F.random_connection(random.Random(seed), A, 4))
    rng = random.Random(seed + 1)
    c1, c2 = (F.random_section(rng, 4, 0) for _ in range(2))
    assert r_del.evaluate([c1, c2]) == -r_del.evaluate([c2, c1])


def test_comma_refuses_invalid_input():
    delta, C, A = F.comma_input("heis")
    with pytest.raises(InputError):
        build_comma(delta, C, A, Connection.zero(A, 2))
    wrong = BundleMap([[0, 0, 1], [0, 1, 0]], 3, 2, 0)  # z -> a1 is not a morphism from heis to R^2
    with pytest.raises(RefusalError) as info:
        build_comma(wrong, C, A, Connection.zero(A, 3))
    assert not info.value.report.ok


@pytest.mark.parametrize("name", F.QUOTIENT_FIXTURES)
def test_pi_flat_for_extended_connections(name):
    from dlalg.diagram import crossed_module_from_diagram
    from dlalg.quotient import extend_connection

    cd = F.diagram(name)
    nabla = extend_connection(cd, crossed_module_from_diagram(cd, "A"), F.random_w(random.Random(3), cd))
    s = build_comma(cd.delA, cd.C, cd.A, nabla)
    assert check_pi_flat(s, cd, nabla).ok


def test_pi_flat_rejects_non_extending_connection():
    cd = F.pair_aff()
    nabla = Connection.zero(cd.A, 4)  # a1 should act on e2 by [e1, e2] = e2
    with pytest.raises(InputError):
        check_pi_flat(build_comma(cd.delA, cd.C, cd.A, nabla), cd, nabla)


def test_identity_comma_morphism_has_zero_form():
    delta, C, A = F.comma_input("pair-aff")
    nabla = F.random_connection(random.Random(5), A, 4)
    ident = (BundleMap.identity(4, 0), BundleMap.identity(2, 0))
    cm = build_comma_morphism(ident, (delta, C, A, nabla), (delta, C, A, nabla))
    assert cm.report.ok
    assert all(cm.omega.value((i,)) == BundleMap.zero(4, 4, 0) for i in range(2))


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6))
def test_perturbation_is_the_comma_form(seed):
    rng = random.Random(seed)
    delta, C, A = F.comma_input("heis")
    n1 = F.random_connection(rng, A, 3, degree=0)
    P = [[[F.random_rational(rng) for _ in range(3)] for _ in range(3)] for _ in range(2)]
    n2 = Connection(A, 3, [[[g + Fraction(q) for g, q in zip(n1.christoffel[i][j], P[i][j])] for j in range(3)]
                           for i in range(2)])
    ident = (BundleMap.identity(3, 0), BundleMap.identity(2, 0))
    cm = build_comma_morphism(ident, (delta, C, A, n1), (delta, C, A, n2))
    assert cm.report.ok, cm.report.to_text()
    for i in range(2):
        expected = BundleMap([[P[i][j][k] for j in range(3)] for k in range(3)], 3, 3, 0)
        assert cm.omega.value((i,)) == expected


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10**6))
def test_abelianization_square_induces_a_morphism(seed):
    rng = random.Random(seed)
    square, (d1, C1, A1), (d2, C2, A2) = F.heis_ab_square()
    n1 = F.random_connection(rng, A1, 3, degree=0)
    n2 = F.random_connection(rng, A2, 2, degree=0)
    cm = build_comma_morphism(square, (d1, C1, A1, n1), (d2, C2, A2, n2))
    assert cm.report.ok, cm.report.to_text()


def test_non_commuting_square_is_rejected():
    square, (d1, C1, A1), (d2, C2, A2) = F.heis_ab_square()
    swap = BundleMap([[0, 1], [1, 0]], 2, 2, 0)
    with pytest.raises(InputError):
        build_comma_morphism((square[0], swap), (d1, C1, A1, Connection.zero(A1, 3)),
                             (d2, C2, A2, Connection.zero(A2, 2)))
