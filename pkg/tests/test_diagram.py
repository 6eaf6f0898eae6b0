from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dlalg import fixtures as F
from dlalg.algebroid import BundleMap, Connection, Section
from dlalg.diagram import (
    CrossedModule,
    DiagramMorphism,
    FrameCoordinates,
    crossed_module_from_diagram,
    diagram_mismatch,
    kernel_frame,
    right_inverse,
    validate_core_diagram,
    validate_crossed_module,
    validate_diagram_morphism,
)
from dlalg.errors import InputError


def sec(*comps, dim: int = 0) -> Section:
    return Section([Fraction(c) for c in comps], dim)


@pytest.mark.parametrize("name", F.QUOTIENT_FIXTURES + ("r2-id",))
def test_fixture_diagrams_are_valid(name):
    r = validate_core_diagram(F.diagram(name))
    assert r.ok, r.to_text()


def test_badker_fails_only_commuting_kernels():
    r = validate_core_diagram(F.badker())
    assert [c.check_id for c in r.failures] == ["core_diagram.commuting_kernels"]
    c = r.get("core_diagram.commuting_kernels")
    assert c.counterexample == ("x", "y")
    assert "z" in c.detail


def test_missing_sigma_is_skipped_not_failed():
    cd = F.ab2().with_choices(sigmaA=None)
    r = validate_core_diagram(cd)
    assert r.ok
    assert r.status_of("core_diagram.sigmaA.right_inverse") == "skipped"


def test_wrong_sigma_fails():
    cd = F.ab2().with_choices(sigmaB=BundleMap([[1], [0]], 1, 2, 0))
    r = validate_core_diagram(cd)
    assert r.status_of("core_diagram.sigmaB.right_inverse") == "fail"


def test_pair_aff_crossed_module_action():
    xm = crossed_module_from_diagram(F.pair_aff(), "A")
    e1, e2 = xm.Cker.frame()
    assert xm.nablaA.on_basis(0, e2) == e2
    assert xm.nablaA.on_basis(0, e1).is_zero()
    assert xm.Cker.bracket(e1, e2) == e2
    assert validate_crossed_module(xm).ok


@pytest.mark.parametrize("name", F.QUOTIENT_FIXTURES)
@pytest.mark.parametrize("side", ["A", "B"])
def test_crossed_modules_of_fixtures(name, side):
    assert validate_crossed_module(crossed_module_from_diagram(F.diagram(name), side)).ok


def test_crossed_module_independent_of_sigmaA():
    cd = F.pair_aff()
    xm1 = crossed_module_from_diagram(cd, "A")
    xm2 = crossed_module_from_diagram(cd.with_choices(sigmaA=F.pair_aff_alt_sigmaA()), "A")
    assert xm1.nablaA == xm2.nablaA


def test_tampered_crossed_module_fails_2a():
    xm = crossed_module_from_diagram(F.pair_aff(), "A")
    # a1 acting by the identity is not a derivation of [e1, e2] = e2
    tampered = Connection(xm.A, 2, [[[1, 0], [0, 1]], [[0, 0], [0, 0]]])
    r = validate_crossed_module(CrossedModule(xm.A, xm.Cker, xm.delta, tampered, xm.frame))
    assert r.status_of("xm.old_2a") == "fail"


def test_crossed_module_needs_sigma():
    with pytest.raises(InputError):
        crossed_module_from_diagram(F.ab2().with_choices(sigmaA=None), "A")
    with pytest.raises(InputError):
        crossed_module_from_diagram(F.ab2(), "C")


def test_identity_and_collapse_morphisms():
    cd = F.pair_aff()
    d = cd.dim
    ident = DiagramMorphism(BundleMap.identity(2, d), BundleMap.identity(2, d), BundleMap.identity(4, d))
    assert validate_diagram_morphism(ident, cd, cd).ok
    m, target = F.pair_aff_collapse()
    assert validate_diagram_morphism(m, cd, target).ok
    m2, target2 = F.heis_abelianization()
    assert validate_diagram_morphism(m2, F.heis_id_ab(), target2).ok


def test_morphism_with_wrong_square_fails():
    m, target = F.pair_aff_collapse()
    # phiC picks the wrong aff factor for each side
    swapped = DiagramMorphism(m.phiA, m.phiB, BundleMap([[0, 0, 1, 0], [1, 0, 0, 0]], 4, 2, 0))
    r = validate_diagram_morphism(swapped, F.pair_aff(), target)
    assert r.status_of("diagram_morphism.square.A") == "fail"
    assert r.status_of("diagram_morphism.square.B") == "fail"


def test_mismatch_ignores_choices():
    cd = F.heis_id_ab()
    assert diagram_mismatch(cd, cd.with_choices(sigmaB=F.heis_id_ab_alt_sigmaB())) is None
    other = cd.with_choices(delB=BundleMap([[1, 0, 0], [0, 2, 0]], 3, 2, 0))
    assert diagram_mismatch(cd, other) == "delB"


matrices = st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_kernel_frame_against_sympy(rows):
    phi = BundleMap(rows, 4, len(rows), 0)
    frame = kernel_frame(phi)
    assert len(frame) == 4 - sympy.Matrix(rows).rank()
    for g in frame:
        assert phi.apply(g).is_zero()
    if frame:
        fc = FrameCoordinates(frame, 4, 0)
        for g in frame:
            assert fc.inclusion.apply(fc.coords(g)) == g


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_right_inverse_exists_iff_full_row_rank(rows):
    phi = BundleMap(rows, 4, len(rows), 0)
    sigma = right_inverse(phi)
    full = sympy.Matrix(rows).rank() == len(rows)
    assert (sigma is not None) == full
    if full:
        assert phi.compose(sigma) == BundleMap.identity(len(rows), 0)


def test_frame_coordinates_rejects_outside_vectors():
    fc = FrameCoordinates([sec(1, 0, 0)], 3, 0)
    assert fc.coords(sec(3, 0, 0)) == sec(3)
    assert fc.coords(sec(0, 1, 0)) is None
    with pytest.raises(InputError):
        fc.require(sec(0, 1, 0), "y")
    with pytest.raises(InputError):
        FrameCoordinates([sec(1, 0), sec(2, 0)], 2, 0)


def test_constructor_guards():
    cd = F.ab2()
    with pytest.raises(InputError):
        cd.with_choices(delA=BundleMap([[1, 0, 0]], 3, 1, 0))
    with pytest.raises(InputError):
        cd.with_choices(kerA_frame=[sec(1, 0, 0)])
