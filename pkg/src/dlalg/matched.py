"""Split double Lie algebroids as matched pairs of 2-representations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .algebroid import (
    Algebroid,
    BundleMap,
    HomValuedForm,
    Section,
    validate_algebroid,
)
from .errors import InputError, RefusalError
from .report import Report, run_check
from .rep2 import TwoRep, TwoRepMorphism, validate_two_rep, validate_two_rep_morphism


class SplitDLA:
    """A decomposed double Lie algebroid with sides A, B and core C.

    ``trepA`` is the 2-representation of A on delB: C -> B with
    (conn0, conn1, curv) = (nabla^AC, nabla^AB, R_A); ``trepB`` is the one of
    B on delA: C -> A with (nabla^BC, nabla^BA, R_B).
    """

    def __init__(self, A: Algebroid, B: Algebroid, trepA: TwoRep, trepB: TwoRep,
                 C_names: Sequence[str] | None = None, name: str = ""):
        c_rank = trepA.rank0
        if trepB.rank0 != c_rank:
            raise InputError("the two 2-representations disagree on the core rank")
        if trepA.rank1 != B.rank or trepB.rank1 != A.rank:
            raise InputError("core-anchors do not land in the side algebroids")
        if trepA.acting.rank != A.rank or trepB.acting.rank != B.rank:
            raise InputError("2-representations act through the wrong side algebroids")
        if A.dim != B.dim:
            raise InputError("side algebroids live on different charts")
        self.A = A
        self.B = B
        self.C_rank = c_rank
        self.C_names = tuple(C_names) if C_names else tuple(trepA.e0_names)
        if len(self.C_names) != c_rank:
            raise InputError("wrong number of core basis names")
        self.trepA = trepA.replace(acting=A, e0_names=self.C_names, e1_names=B.basis_names)
        self.trepB = trepB.replace(acting=B, e0_names=self.C_names, e1_names=A.basis_names)
        self.name = name

    @property
    def dim(self) -> int:
        return self.A.dim

    @property
    def delA(self) -> BundleMap:
        return self.trepB.boundary

    @property
    def delB(self) -> BundleMap:
        return self.trepA.boundary

    @property
    def nabla_AC(self):
        return self.trepA.conn0

    @property
    def nabla_AB(self):
        return self.trepA.conn1

    @property
    def nabla_BC(self):
        return self.trepB.conn0

    @property
    def nabla_BA(self):
        return self.trepB.conn1

    @property
    def R_A(self) -> HomValuedForm:
        return self.trepA.curv

    @property
    def R_B(self) -> HomValuedForm:
        return self.trepB.curv

    def core_basis(self, k: int) -> Section:
        return Section.basis(self.C_rank, k, self.dim)

    def core_bracket(self, c1: Section, c2: Section) -> Section:
        return self.nabla_AC.apply(self.delA.apply(c1), c2) - self.nabla_BC.apply(self.delB.apply(c2), c1)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SplitDLA) and self.A == other.A and self.B == other.B
                and self.trepA == other.trepA and self.trepB == other.trepB)

    def __hash__(self) -> int:
        return hash((self.C_rank, self.A.rank, self.B.rank))

    def __repr__(self) -> str:
        return f"SplitDLA({self.name!r}, A={self.A.name}, B={self.B.name}, C rank {self.C_rank})"


def _dR_B(s: SplitDLA, a1: Section, a2: Section, b1: Section, b2: Section) -> Section:
    """d of R_B seen as a 1-form on A with values in wedge^2 B* (x) C."""
    A, nAC, nAB, RB = s.A, s.nabla_AC, s.nabla_AB, s.R_B

    def half(x: Section, y: Section) -> Section:
        return (nAC.apply(x, RB.apply([b1, b2], y))
                - RB.apply([nAB.apply(x, b1), b2], y)
                - RB.apply([b1, nAB.apply(x, b2)], y))

    return half(a1, a2) - half(a2, a1) - RB.apply([b1, b2], A.bracket(a1, a2))


def _dR_A(s: SplitDLA, b1: Section, b2: Section, a1: Section, a2: Section) -> Section:
    B, nBC, nBA, RA = s.B, s.nabla_BC, s.nabla_BA, s.R_A

    def half(x: Section, y: Section) -> Section:
        return (nBC.apply(x, RA.apply([a1, a2], y))
                - RA.apply([nBA.apply(x, a1), a2], y)
                - RA.apply([a1, nBA.apply(x, a2)], y))

    return half(b1, b2) - half(b2, b1) - RA.apply([a1, a2], B.bracket(b1, b2))


def matched_conditions(s: SplitDLA) -> Report:
    """The anchor compatibility and (M1)-(M7), without the 2-representation axioms."""
    A, B = s.A, s.B
    dA, dB = s.delA, s.delB
    nAC, nAB, nBC, nBA = s.nabla_AC, s.nabla_AB, s.nabla_BC, s.nabla_BA
    RA, RB = s.R_A, s.R_B
    fa, fb = A.frame(), B.frame()
    fc = [s.core_basis(k) for k in range(s.C_rank)]
    la, lb, lc = A.label, B.label, s.C_names
    nA, nB, nC = A.rank, B.rank, s.C_rank
    report = Report()

    def anchor(k):
        va = A.anchor_field(dA.apply(fc[k]))
        vb = B.anchor_field(dB.apply(fc[k]))
        return Section(tuple(x - y for x, y in zip(va, vb)), s.dim)

    report.add(run_check("matched.anchor", "rho_C", (((lc[k],), lambda k=k: anchor(k)) for k in range(nC))))

    def m1(i, j):
        c1, c2 = fc[i], fc[j]
        return (nAC.apply(dA.apply(c1), c2) - nBC.apply(dB.apply(c2), c1)
                + nAC.apply(dA.apply(c2), c1) - nBC.apply(dB.apply(c1), c2))

    report.add(run_check("matched.M1", "M1", (((lc[i], lc[j]), lambda i=i, j=j: m1(i, j))
                                              for i in range(nC) for j in range(i, nC))))

    def m2(i, k):
        a, c = fa[i], fc[k]
        return A.bracket(a, dA.apply(c)) - dA.apply(nAC.apply(a, c)) + nBA.apply(dB.apply(c), a)

    report.add(run_check("matched.M2", "M2", (((la(i), lc[k]), lambda i=i, k=k: m2(i, k))
                                              for i in range(nA) for k in range(nC))))

    def m3(i, k):
        b, c = fb[i], fc[k]
        return B.bracket(b, dB.apply(c)) - dB.apply(nBC.apply(b, c)) + nAB.apply(dA.apply(c), b)

    report.add(run_check("matched.M3", "M3", (((lb(i), lc[k]), lambda i=i, k=k: m3(i, k))
                                              for i in range(nB) for k in range(nC))))

    def m4(i, j, k):
        a, b, c = fa[i], fb[j], fc[k]
        lhs = (nBC.apply(b, nAC.apply(a, c)) - nAC.apply(a, nBC.apply(b, c))
               - nAC.apply(nBA.apply(b, a), c) + nBC.apply(nAB.apply(a, b), c))
        rhs = RB.apply([b, dB.apply(c)], a) - RA.apply([a, dA.apply(c)], b)
        return lhs - rhs

    report.add(run_check("matched.M4", "M4", (((la(i), lb(j), lc[k]), lambda i=i, j=j, k=k: m4(i, j, k))
                                              for i in range(nA) for j in range(nB) for k in range(nC))))

    def m5(i, j, k):
        a1, a2, b = fa[i], fa[j], fb[k]
        rhs = (-nBA.apply(b, A.bracket(a1, a2)) + A.bracket(nBA.apply(b, a1), a2)
               + A.bracket(a1, nBA.apply(b, a2)) + nBA.apply(nAB.apply(a2, b), a1)
               - nBA.apply(nAB.apply(a1, b), a2))
        return dA.apply(RA.apply([a1, a2], b)) - rhs

    report.add(run_check("matched.M5", "M5", (((la(i), la(j), lb(k)), lambda i=i, j=j, k=k: m5(i, j, k))
                                              for i, j in itertools.combinations(range(nA), 2)
                                              for k in range(nB))))

    def m6(i, j, k):
        b1, b2, a = fb[i], fb[j], fa[k]
        rhs = (-nAB.apply(a, B.bracket(b1, b2)) + B.bracket(nAB.apply(a, b1), b2)
               + B.bracket(b1, nAB.apply(a, b2)) + nAB.apply(nBA.apply(b2, a), b1)
               - nAB.apply(nBA.apply(b1, a), b2))
        return dB.apply(RB.apply([b1, b2], a)) - rhs

    report.add(run_check("matched.M6", "M6", (((lb(i), lb(j), la(k)), lambda i=i, j=j, k=k: m6(i, j, k))
                                              for i, j in itertools.combinations(range(nB), 2)
                                              for k in range(nA))))

    def m7(i, j, k, l):
        a1, a2, b1, b2 = fa[i], fa[j], fb[k], fb[l]
        return _dR_B(s, a1, a2, b1, b2) - _dR_A(s, b1, b2, a1, a2)

    report.add(run_check("matched.M7", "M7", (((la(i), la(j), lb(k), lb(l)),
                                               lambda i=i, j=j, k=k, l=l: m7(i, j, k, l))
                                              for i, j in itertools.combinations(range(nA), 2)
                                              for k, l in itertools.combinations(range(nB), 2))))
    return report


def validate_matched_pair(s: SplitDLA) -> Report:
    """Both 2-representation validations, then the matched-pair conditions.

    All checks are always evaluated, so a failing (M*) condition is reported
    even when a 2-representation axiom also fails.
    """
    report = Report()
    report.extend(validate_two_rep(s.trepA), prefix="trepA.")
    report.extend(validate_two_rep(s.trepB), prefix="trepB.")
    report.extend(matched_conditions(s))
    return report


def core_algebroid(s: SplitDLA, check: bool = True) -> Algebroid:
    """The Lie algebroid on the core, with anchor rho_A o delA."""
    if check:
        rep = validate_matched_pair(s)
        if not rep.ok:
            raise RefusalError("core_algebroid needs a matched pair", rep)
    fc = [s.core_basis(k) for k in range(s.C_rank)]
    structure = {(i, j): s.core_bracket(fc[i], fc[j]) for i, j in itertools.combinations(range(s.C_rank), 2)}
    anchor = [[s.A.anchor_field(s.delA.apply(fc[k]))[u] for k in range(s.C_rank)] for u in range(s.dim)]
    return Algebroid("C", s.A.chart, s.C_rank, anchor, structure, s.C_names)


def check_commuting_kernels(s: SplitDLA, kerA_frame: Sequence[Section], kerB_frame: Sequence[Section]) -> Report:
    """Core brackets between ker delB and ker delA must vanish."""
    for g in kerA_frame:
        if not s.delB.apply(g).is_zero():
            raise InputError(f"kernel frame element {g.format(s.C_names)} is not annihilated by delB")
    for g in kerB_frame:
        if not s.delA.apply(g).is_zero():
            raise InputError(f"kernel frame element {g.format(s.C_names)} is not annihilated by delA")
    names = s.C_names
    report = Report()
    report.add(run_check(
        "matched.commuting_kernels", "prop:kercomm",
        (((g.format(names), h.format(names)), lambda g=g, h=h: s.core_bracket(g, h))
         for g in kerA_frame for h in kerB_frame),
    ))
    return report


@dataclass(frozen=True)
class DLAMorphism:
    """Side maps and core map plus the form phi(a, b) in C'."""

    phiA: BundleMap
    phiB: BundleMap
    phiC: BundleMap
    form: HomValuedForm

    def transpose_form(self, src: SplitDLA) -> HomValuedForm:
        """phi seen as a 1-form on B with values in Hom(A, C')."""
        dim = src.dim
        f = self.form
        vals = {}
        for j in range(src.B.rank):
            cols = [f.value((i,)).column(j) for i in range(src.A.rank)]
            vals[(j,)] = BundleMap.from_columns(cols, f.target_rank, dim)
        return HomValuedForm(src.B, 1, src.A.rank, f.target_rank, vals)


def validate_dla_morphism(m: DLAMorphism, src: SplitDLA, dst: SplitDLA) -> Report:
    """Check both VB-algebroid morphism conditions of a double Lie algebroid morphism."""
    report = Report()
    side_a = TwoRepMorphism(m.phiC, m.phiB, m.form)
    report.extend(validate_two_rep_morphism(side_a, src.trepA, dst.trepA, m.phiA), prefix="A_side.")
    side_b = TwoRepMorphism(m.phiC, m.phiA, m.transpose_form(src))
    report.extend(validate_two_rep_morphism(side_b, src.trepB, dst.trepB, m.phiB), prefix="B_side.")
    return report


def compose_dla_morphisms(second: DLAMorphism, first: DLAMorphism, src: SplitDLA) -> DLAMorphism:
    """second after first; the form picks up phiC' o phi + psi(phiA a, phiB b)."""
    fa = src.A.frame()
    fb = src.B.frame()
    dim = src.dim
    vals = {}
    for i in range(src.A.rank):
        cols = []
        for j in range(src.B.rank):
            v = second.phiC.apply(first.form.value((i,)).column(j))
            v = v + second.form.apply([first.phiA.apply(fa[i])], first.phiB.apply(fb[j]))
            cols.append(v)
        vals[(i,)] = BundleMap.from_columns(cols, second.phiC.target_rank, dim)
    form = HomValuedForm(src.A, 1, src.B.rank, second.phiC.target_rank, vals)
    return DLAMorphism(second.phiA.compose(first.phiA), second.phiB.compose(first.phiB),
                       second.phiC.compose(first.phiC), form)


def validate_core_algebroid(s: SplitDLA) -> Report:
    return validate_algebroid(core_algebroid(s, check=False))


def extract_core_diagram(s: SplitDLA, kerA_frame: Sequence[Section] | None = None,
                         kerB_frame: Sequence[Section] | None = None, sigmaA: BundleMap | None = None,
                         sigmaB: BundleMap | None = None, check: bool = True):
    """The core diagram (C, delA, delB) of a matched pair.

    Kernel frames and right inverses are computed exactly when the
    core-anchors have constant entries and were not supplied.
    """
    from .diagram import CoreDiagram, kernel_frame, right_inverse

    C = core_algebroid(s, check=check)
    if kerA_frame is None:
        kerA_frame = kernel_frame(s.delB)
    if kerB_frame is None:
        kerB_frame = kernel_frame(s.delA)
    if sigmaA is None and s.delA.is_constant():
        sigmaA = right_inverse(s.delA, "sigmaA")
    if sigmaB is None and s.delB.is_constant():
        sigmaB = right_inverse(s.delB, "sigmaB")
    return CoreDiagram(C, s.A, s.B, s.delA, s.delB, list(kerA_frame), list(kerB_frame), sigmaA, sigmaB,
                       name=s.name)
