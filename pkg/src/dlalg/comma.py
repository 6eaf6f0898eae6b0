"""The comma double Lie algebroid of a morphism C -> A, in split form."""
from __future__ import annotations

from dataclasses import dataclass

from .algebroid import (
    Algebroid,
    BundleMap,
    Connection,
    HomValuedForm,
    Section,
    curvature,
    validate_algebroid,
    validate_algebroid_morphism,
)
from .errors import InputError, RefusalError
from .matched import DLAMorphism, SplitDLA, validate_dla_morphism
from .report import Report, run_check
from .rep2 import TwoRep


def del_connections(delta: BundleMap, C: Algebroid, A: Algebroid, nabla: Connection):
    """The C-connections on C and on A, and the tensor R^del, induced by nabla.

    On C: c' -> [c, c'] + nabla_{del c'} c. On A: a -> [del c, a] + del(nabla_a c).
    """
    dim = C.dim
    fc, fa = C.frame(), A.frame()
    on_c = Connection.from_operator(
        C, C.rank, lambda i, j: C.bracket(fc[i], fc[j]) + nabla.apply(delta.apply(fc[j]), fc[i]))
    on_a = Connection.from_operator(
        C, A.rank, lambda i, j: A.bracket(delta.apply(fc[i]), fa[j]) + delta.apply(nabla.apply(fa[j], fc[i])))

    def r_value(idx):
        i, j = idx
        c1, c2 = fc[i], fc[j]
        br = C.bracket(c1, c2)
        cols = []
        for k in range(A.rank):
            a = fa[k]
            v = (-nabla.apply(a, br) + C.bracket(nabla.apply(a, c1), c2) + C.bracket(c1, nabla.apply(a, c2))
                 - nabla.apply(on_a.apply(c1, a), c2) + nabla.apply(on_a.apply(c2, a), c1))
            cols.append(v)
        return BundleMap.from_columns(cols, C.rank, dim)

    r_del = HomValuedForm.from_function(C, 2, A.rank, C.rank, r_value)
    return on_c, on_a, r_del


def _require_valid(delta: BundleMap, C: Algebroid, A: Algebroid, nabla: Connection) -> None:
    if nabla.acting.rank != A.rank or nabla.module_rank != C.rank:
        raise InputError("connection must be an A-connection on C")
    pre = Report()
    pre.extend(validate_algebroid(C), prefix="C.")
    pre.extend(validate_algebroid(A), prefix="A.")
    pre.extend(validate_algebroid_morphism(delta, C, A), prefix="del.")
    if not pre.ok:
        raise RefusalError("comma construction needs valid algebroids and a morphism", pre)


def build_comma(delta: BundleMap, C: Algebroid, A: Algebroid, nabla: Connection, check: bool = True,
                name: str = "") -> SplitDLA:
    """Split data of the comma double Lie algebroid with sides A and C and core C."""
    if check:
        _require_valid(delta, C, A, nabla)
    dim = C.dim
    ident = BundleMap.identity(C.rank, dim, "id")
    trepA = TwoRep(A, ident, nabla, nabla, curvature(nabla), C.basis_names, C.basis_names)
    on_c, on_a, r_del = del_connections(delta, C, A, nabla)
    trepB = TwoRep(C, delta, on_c, on_a, r_del, C.basis_names, A.basis_names)
    return SplitDLA(A, C, trepA, trepB, C.basis_names, name=name or f"comma({C.name}->{A.name})")


def check_pi_flat(s: SplitDLA, cd, nabla: Connection) -> Report:
    """Vanishing of nabla^del and R^del along the kernel frame of a target diagram.

    ``s`` must be ``build_comma(cd.delA, cd.C, cd.A, nabla)``; nabla has to
    restrict to the crossed-module connection a -> [sigmaA(a), gamma].
    """
    C, A = cd.C, cd.A
    if cd.sigmaA is None:
        raise InputError("check_pi_flat needs sigmaA on the diagram")
    fa = A.frame()
    for i in range(A.rank):
        lift = cd.sigmaA.apply(fa[i])
        for g in cd.kerA_frame:
            if nabla.apply(fa[i], g) != C.bracket(lift, g):
                raise InputError(
                    f"connection does not extend the crossed-module action at ({A.label(i)}, {cd.label(g)})")
    on_c, on_a, r_del = s.trepB.conn0, s.trepB.conn1, s.trepB.curv
    fc = C.frame()
    report = Report()
    report.add(run_check(
        "pi.nabla_del_A", "prop_ruth_0",
        (((cd.label(g), A.label(i)), lambda g=g, i=i: on_a.apply(g, fa[i]))
         for g in cd.kerA_frame for i in range(A.rank)),
    ))
    report.add(run_check(
        "pi.nabla_del_C", "prop_ruth_0",
        (((cd.label(g), C.label(k)), lambda g=g, k=k: on_c.apply(g, fc[k]))
         for g in cd.kerA_frame for k in range(C.rank)),
    ))
    report.add(run_check(
        "pi.R_del", "prop_ruth_0",
        (((cd.label(g), C.label(k)), lambda g=g, k=k: r_del.evaluate([g, fc[k]]))
         for g in cd.kerA_frame for k in range(C.rank)),
    ))
    return report


def comma_omega(phiC: BundleMap, phiA: BundleMap, A: Algebroid, nabla: Connection, nabla2: Connection,
                C_rank2: int) -> HomValuedForm:
    """omega(a, c) = nabla'_{phiA a}(phiC c) - phiC(nabla_a c), a Hom(C, C')-valued 1-form on A."""
    dim = A.dim
    fa = A.frame()

    def value(idx):
        (i,) = idx
        cols = []
        for k in range(nabla.module_rank):
            c = Section.basis(nabla.module_rank, k, dim)
            cols.append(nabla2.apply(phiA.apply(fa[i]), phiC.apply(c)) - phiC.apply(nabla.apply(fa[i], c)))
        return BundleMap.from_columns(cols, C_rank2, dim)

    return HomValuedForm.from_function(A, 1, nabla.module_rank, C_rank2, value)


@dataclass
class CommaMorphism:
    morphism: DLAMorphism
    omega: HomValuedForm
    report: Report


def build_comma_morphism(square, src, dst) -> CommaMorphism:
    """Morphism of comma double Lie algebroids induced by a commuting square.

    ``square`` is (phiC, phiA); ``src`` and ``dst`` are (del, C, A, nabla).
    """
    phiC, phiA = square
    d1, C1, A1, n1 = src
    d2, C2, A2, n2 = dst
    pre = Report()
    pre.extend(validate_algebroid_morphism(phiC, C1, C2), prefix="phiC.")
    pre.extend(validate_algebroid_morphism(phiA, A1, A2), prefix="phiA.")
    fc = C1.frame()
    pre.add(run_check(
        "square", "mor_dvb",
        (((C1.label(k),), lambda k=k: d2.apply(phiC.apply(fc[k])) - phiA.apply(d1.apply(fc[k])))
         for k in range(C1.rank)),
    ))
    if not pre.ok:
        raise InputError("comma morphism needs a commuting square of algebroid morphisms")
    s1 = build_comma(d1, C1, A1, n1)
    s2 = build_comma(d2, C2, A2, n2)
    omega = comma_omega(phiC, phiA, A1, n1, n2, C2.rank)
    morphism = DLAMorphism(phiA, phiC, phiC, omega)
    report = validate_dla_morphism(morphism, s1, s2)
    return CommaMorphism(morphism, omega, report)


__all__ = ["build_comma", "build_comma_morphism", "check_pi_flat", "comma_omega", "del_connections",
           "CommaMorphism"]
