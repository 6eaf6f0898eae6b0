"""The quotient double Lie algebroid of a transitive core diagram, in split form.

The quotient is never built as a set: its decomposed data is obtained from
the comma data by precomposing with a right inverse sigmaB of delB, and the
vanishing on ker delB that makes this well defined is checked, not assumed.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .algebroid import (
    BundleMap,
    Connection,
    HomValuedForm,
    Section,
    curvature,
    surjectivity_certificate,
)
from .comma import build_comma, check_pi_flat, comma_omega
from .diagram import (
    CoreDiagram,
    CrossedModule,
    DiagramMorphism,
    FrameCoordinates,
    validate_diagram_morphism,
)
from .errors import InputError, RefusalError
from .matched import DLAMorphism, SplitDLA, validate_dla_morphism
from .report import Report, run_check
from .rep2 import TwoRep


def _c_section(cd: CoreDiagram, value) -> Section:
    if isinstance(value, Section):
        return value
    return Section(value, cd.dim)


def extend_connection(cd: CoreDiagram, xm: CrossedModule, nablaW: Sequence | None = None) -> Connection:
    """An A-connection on C equal to the crossed-module action on ker delB.

    ``nablaW[i][m]`` is the derivative of sigmaB(b_m) along a_i, a section of
    C; it defaults to zero. Elsewhere the connection is fixed by splitting
    c = (c - sigmaB delB c) + sigmaB delB c and the Leibniz rule.
    """
    if cd.sigmaB is None:
        raise InputError("extend_connection needs sigmaB on the diagram")
    C, A, B = cd.C, cd.A, cd.B
    dim = C.dim
    if xm.frame is None or len(xm.frame) != len(cd.kerA_frame):
        raise InputError("crossed module does not come from this diagram's kernel frame")
    if nablaW is None:
        W = [[Section.zero(C.rank, dim) for _ in range(B.rank)] for _ in range(A.rank)]
    else:
        if len(nablaW) != A.rank or any(len(row) != B.rank for row in nablaW):
            raise InputError(f"nablaW must be a {A.rank} x {B.rank} table of sections of C")
        W = [[_c_section(cd, v) for v in row] for row in nablaW]
        if any(v.rank != C.rank for row in W for v in row):
            raise InputError("nablaW entries must be sections of C")
    fc = FrameCoordinates(cd.kerA_frame, C.rank, dim)
    sigma, delB = cd.sigmaB, cd.delB
    lifts = [sigma.column(m) for m in range(B.rank)]

    def op(i: int, k: int) -> Section:
        c = C.basis(k)
        b = delB.apply(c)
        gamma = c - sigma.apply(b)
        x = fc.require(gamma, f"{C.label(k)} - sigmaB delB {C.label(k)}")
        out = fc.inclusion.apply(xm.nablaA.on_basis(i, x))
        for m in range(B.rank):
            if not b[m].is_zero():
                out = out + W[i][m].times(b[m])
            d = A.derive(i, b[m])
            if not d.is_zero():
                out = out + lifts[m].times(d)
        return out

    return Connection.from_operator(A, C.rank, op)


def quotient_well_defined(cd: CoreDiagram, nabla: Connection) -> Report:
    """Vanishing along ker delB needed for the descended data."""
    C, A = cd.C, cd.A
    fa = A.frame()
    curv = curvature(nabla)
    report = Report()
    report.add(run_check(
        "quotient.nablaB_descends", "ruth_A_D",
        (((A.label(i), cd.label(g)), lambda i=i, g=g: cd.delB.apply(nabla.apply(fa[i], g)))
         for i in range(A.rank) for g in cd.kerA_frame),
    ))
    report.add(run_check(
        "quotient.Rbar_descends", "ruth_A_D1",
        (((A.label(i), A.label(j), cd.label(g)), lambda i=i, j=j, g=g: curv.value((i, j)).apply(g))
         for i, j in itertools.combinations(range(A.rank), 2) for g in cd.kerA_frame),
    ))
    if cd.sigmaA is None:
        raise InputError("quotient construction needs sigmaA on the diagram")
    extends = run_check(
        "quotient.extends_action", "ruth_A_D",
        (((A.label(i), cd.label(g)),
          lambda i=i, g=g: nabla.apply(fa[i], g) - C.bracket(cd.sigmaA.apply(fa[i]), g))
         for i in range(A.rank) for g in cd.kerA_frame),
    )
    report.add(extends)
    if extends.status == "pass":
        comma = build_comma(cd.delA, C, A, nabla, check=False)
        report.extend(check_pi_flat(comma, cd, nabla))
    return report


def _require_sigma(cd: CoreDiagram, sigmaB: BundleMap | None) -> BundleMap:
    sigma = sigmaB if sigmaB is not None else cd.sigmaB
    if sigma is None:
        raise InputError("quotient construction needs a right inverse sigmaB")
    if cd.delB.compose(sigma) != BundleMap.identity(cd.B.rank, cd.dim):
        raise InputError("sigmaB is not a right inverse of delB")
    return sigma


def build_quotient(cd: CoreDiagram, nabla: Connection, sigmaB: BundleMap | None = None, check: bool = True,
                   name: str = "") -> SplitDLA:
    """Split data of the quotient double Lie algebroid with sides A and B and core C."""
    sigma = _require_sigma(cd, sigmaB)
    C, A, B = cd.C, cd.A, cd.B
    if nabla.acting.rank != A.rank or nabla.module_rank != C.rank:
        raise InputError("connection must be an A-connection on C")
    ok, kind, ranks = surjectivity_certificate(cd.delB)
    if not ok:
        raise InputError(f"delB is not surjective ({kind} ranks {ranks})")
    if check:
        wd = quotient_well_defined(cd, nabla)
        if not wd.ok:
            raise RefusalError("connection does not descend to the quotient", wd)
    dim = C.dim
    fa, fb = A.frame(), B.frame()
    lifts = [sigma.column(m) for m in range(B.rank)]
    conn_b = Connection.from_operator(A, B.rank, lambda i, m: cd.delB.apply(nabla.apply(fa[i], lifts[m])))
    rbar = curvature(nabla).precompose(sigma)
    trepA = TwoRep(A, cd.delB, nabla, conn_b, rbar, C.basis_names, B.basis_names)

    comma = build_comma(cd.delA, C, A, nabla, check=False)
    on_c, on_a, r_del = comma.trepB.conn0, comma.trepB.conn1, comma.trepB.curv
    red_c = Connection.from_operator(B, C.rank, lambda m, k: on_c.apply(lifts[m], C.basis(k)))
    red_a = Connection.from_operator(B, A.rank, lambda m, i: on_a.apply(lifts[m], fa[i]))
    r_red = HomValuedForm.from_function(B, 2, A.rank, C.rank,
                                        lambda idx: r_del.evaluate([lifts[idx[0]], lifts[idx[1]]]))
    trepB = TwoRep(B, cd.delA, red_c, red_a, r_red, C.basis_names, A.basis_names)
    del dim, fb
    return SplitDLA(A, B, trepA, trepB, C.basis_names, name=name or f"quotient({cd.name})")


def projection_morphism(cd: CoreDiagram) -> DLAMorphism:
    """(a, c, gamma) -> (a, delB c, gamma): sides id_A and delB, core id_C, form 0."""
    dim = cd.dim
    return DLAMorphism(BundleMap.identity(cd.A.rank, dim), cd.delB, BundleMap.identity(cd.C.rank, dim),
                       HomValuedForm.zero(cd.A, 1, cd.C.rank, cd.C.rank))


def quotient_projection_check(commaS: SplitDLA, quotS: SplitDLA, cd: CoreDiagram) -> Report:
    """Both VB-algebroid morphism conditions for the projection comma -> quotient."""
    if commaS.B.rank != cd.C.rank or quotS.B.rank != cd.B.rank or commaS.A.rank != quotS.A.rank:
        raise InputError("comma and quotient do not come from the same diagram")
    if commaS.nabla_AC != quotS.nabla_AC:
        raise InputError("comma and quotient were built from different connections")
    return validate_dla_morphism(projection_morphism(cd), commaS, quotS)


@dataclass
class QuotientMorphism:
    morphism: DLAMorphism
    omega: HomValuedForm
    omega_bar: HomValuedForm
    report: Report


def build_quotient_morphism(dm: DiagramMorphism, src, dst) -> QuotientMorphism:
    """Morphism of quotient double Lie algebroids induced by a diagram morphism.

    ``src`` and ``dst`` are (cd, nabla, sigmaB) triples. The form is
    omega(a, sigmaB b) with omega the comma morphism form, after checking that
    omega vanishes on ker delB.
    """
    cd1, n1, sig1 = src
    cd2, n2, sig2 = dst
    sig1 = _require_sigma(cd1, sig1)
    sig2 = _require_sigma(cd2, sig2)
    pre = validate_diagram_morphism(dm, cd1, cd2)
    if not pre.ok:
        raise RefusalError("diagram morphism failed validation", pre)
    omega = comma_omega(dm.phiC, dm.phiA, cd1.A, n1, n2, cd2.C.rank)
    for i in range(cd1.A.rank):
        for g in cd1.kerA_frame:
            if not omega.value((i,)).apply(g).is_zero():
                raise InputError(
                    f"omega does not vanish on the kernel at ({cd1.A.label(i)}, {cd1.label(g)})")
    omega_bar = omega.precompose(sig1)
    s1 = build_quotient(cd1, n1, sig1)
    s2 = build_quotient(cd2, n2, sig2)
    morphism = DLAMorphism(dm.phiA, dm.phiB, dm.phiC, omega_bar)
    report = validate_dla_morphism(morphism, s1, s2)
    return QuotientMorphism(morphism, omega, omega_bar, report)
