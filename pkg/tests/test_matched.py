from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlalg import fixtures as F
from dlalg.algebroid import BundleMap, Connection, HomValuedForm, validate_algebroid
from dlalg.comma import build_comma
from dlalg.errors import InputError, RefusalError
from dlalg.matched import (
    DLAMorphism,
    SplitDLA,
    check_commuting_kernels,
    compose_dla_morphisms,
    core_algebroid,
    extract_core_diagram,
    validate_dla_morphism,
    validate_matched_pair,
)

M_IDS = [f"matched.M{k}" for k in range(1, 8)]


def heis_comma(seed: int | None = None) -> SplitDLA:
    delta, C, A = F.comma_input("heis")
    nabla = Connection.zero(A, 3) if seed is None else F.random_connection(random.Random(seed), A, 3)
    return build_comma(delta, C, A, nabla)


def test_heis_comma_passes_every_condition():
    r = validate_matched_pair(heis_comma())
    assert r.ok
    assert all(r.status_of(m) == "pass" for m in M_IDS)


def test_core_bracket_recovers_heis():
    s = heis_comma()
    C = core_algebroid(s)
    x, y, z = C.frame()
    assert C.bracket(x, y) == z
    assert C.bracket(x, z).is_zero() and C.bracket(y, z).is_zero()
    assert validate_algebroid(C).ok


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10_000))
def test_core_bracket_does_not_depend_on_nabla(seed):
    assert core_algebroid(heis_comma(seed)) == core_algebroid(heis_comma())


def test_tampered_nabla_bc_fails_an_m_condition():
    s = heis_comma(7)
    bad_conn = F.random_connection(random.Random(8), s.B, 3, degree=0)
    tampered = SplitDLA(s.A, s.B, s.trepA, s.trepB.replace(conn0=bad_conn), s.C_names)
    r = validate_matched_pair(tampered)
    failed = {c.check_id for c in r.failures}
    assert failed & {"matched.M1", "matched.M2", "matched.M3", "matched.M4"}
    for c in r.failures:
        assert c.counterexample


PIECES = ("trepA.conn0", "trepA.conn1", "trepB.conn0", "trepB.conn1", "trepA.curv", "trepB.curv")


def _perturb(s: SplitDLA, piece: str, rng: random.Random) -> SplitDLA:
    side, field = piece.split(".")
    t = getattr(s, side)
    if field == "curv":
        c = t.curv
        idx = (0, 1)
        e = BundleMap([[F.random_rational(rng) or 1 if (r, k) == (0, 0) else 0 for k in range(c.source_rank)]
                       for r in range(c.target_rank)], c.source_rank, c.target_rank, s.dim)
        new = c + HomValuedForm(c.acting, 2, c.source_rank, c.target_rank, {idx: e})
    else:
        conn = getattr(t, field)
        gam = conn.christoffel
        gam[0][0][0] = gam[0][0][0] + (F.random_rational(rng) or 1)
        new = Connection(conn.acting, conn.module_rank, gam)
    t2 = t.replace(**{field: new})
    if side == "trepA":
        return SplitDLA(s.A, s.B, t2, s.trepB, s.C_names)
    return SplitDLA(s.A, s.B, s.trepA, t2, s.C_names)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(PIECES), st.integers(0, 10_000))
def test_every_single_perturbation_is_detected(seed, piece, seed2):
    """Changing one Christoffel symbol or one curvature entry of a valid comma never goes unnoticed."""
    delta, C, A = F.comma_input("pair-aff")
    s = build_comma(delta, C, A, F.random_connection(random.Random(seed), A, 4))
    assert not validate_matched_pair(_perturb(s, piece, random.Random(seed2))).ok


def test_badker_split_has_non_commuting_kernels():
    s = F.badker_split()
    assert s.core_bracket(s.core_basis(0), s.core_basis(1)) == s.core_basis(2)
    r = check_commuting_kernels(s, [s.core_basis(0)], [s.core_basis(1)])
    c = r.get("matched.commuting_kernels")
    assert c.status == "fail" and c.counterexample == ("x", "y")
    with pytest.raises(InputError):
        check_commuting_kernels(s, [s.core_basis(1)], [])


def test_core_algebroid_refuses_unmatched_data():
    s = heis_comma(7)
    bad_conn = F.random_connection(random.Random(8), s.B, 3, degree=0)
    tampered = SplitDLA(s.A, s.B, s.trepA, s.trepB.replace(conn0=bad_conn), s.C_names)
    with pytest.raises(RefusalError):
        core_algebroid(tampered)


@pytest.mark.parametrize("name", F.COMMA_FIXTURES)
def test_comma_core_diagram(name):
    delta, C, A = F.comma_input(name)
    s = build_comma(delta, C, A, Connection.zero(A, C.rank))
    cd = extract_core_diagram(s)
    assert cd.delA == delta
    assert cd.delB == BundleMap.identity(C.rank, C.dim)
    assert cd.C == C and cd.A == A and cd.B == C


def _identity_dla(s: SplitDLA) -> DLAMorphism:
    d = s.dim
    return DLAMorphism(BundleMap.identity(s.A.rank, d), BundleMap.identity(s.B.rank, d),
                       BundleMap.identity(s.C_rank, d), HomValuedForm.zero(s.A, 1, s.B.rank, s.C_rank))


def test_identity_dla_morphism():
    s = heis_comma(2)
    r = validate_dla_morphism(_identity_dla(s), s, s)
    assert r.ok
    assert {c.check_id.split(".")[0] for c in r} == {"A_side", "B_side"}


def test_nonzero_form_on_identity_fails():
    s = heis_comma(2)
    m = _identity_dla(s)
    form = HomValuedForm(s.A, 1, 3, 3, {(0,): BundleMap.identity(3, 0)})
    assert not validate_dla_morphism(DLAMorphism(m.phiA, m.phiB, m.phiC, form), s, s).ok


def test_composition_with_identity():
    s = heis_comma(2)
    rng = random.Random(1)
    form = HomValuedForm(s.A, 1, 3, 3, {(i,): BundleMap([[F.random_rational(rng) for _ in range(3)]
                                                          for _ in range(3)], 3, 3, 0) for i in range(2)})
    m = DLAMorphism(*_identity_dla(s)[:3], form) if False else DLAMorphism(
        BundleMap.identity(2, 0), BundleMap.identity(3, 0), BundleMap.identity(3, 0), form)
    ident = _identity_dla(s)
    assert compose_dla_morphisms(ident, m, s).form == form
    assert compose_dla_morphisms(m, ident, s).form == form
