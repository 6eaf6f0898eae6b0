"""2-term representations up to homotopy and their morphisms."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .algebroid import (
    Algebroid,
    BundleMap,
    Connection,
    HomValuedForm,
    Section,
    curvature,
    hom_derivative,
    koszul_d,
)
from .errors import InputError, RefusalError
from .report import Report, run_check


class TwoRep:
    """Data (boundary, conn0, conn1, curv) of A acting on E0 -> E1.

    ``curv`` is a 2-form on A with values in Hom(E1, E0).
    """

    def __init__(self, acting: Algebroid, boundary: BundleMap, conn0: Connection, conn1: Connection,
                 curv: HomValuedForm | None = None, e0_names: Sequence[str] | None = None,
                 e1_names: Sequence[str] | None = None):
        r0, r1 = boundary.source_rank, boundary.target_rank
        if conn0.module_rank != r0 or conn1.module_rank != r1:
            raise InputError("connections do not match the boundary map's ranks")
        if conn0.acting.rank != acting.rank or conn1.acting.rank != acting.rank:
            raise InputError("connections act through an algebroid of the wrong rank")
        if curv is None:
            curv = HomValuedForm.zero(acting, 2, r1, r0)
        if (curv.degree, curv.source_rank, curv.target_rank) != (2, r1, r0):
            raise InputError("curvature term must be a Hom(E1, E0)-valued 2-form")
        self.acting = acting
        self.boundary = boundary
        self.conn0 = conn0
        self.conn1 = conn1
        self.curv = curv
        self.e0_names = tuple(e0_names) if e0_names else tuple(f"u{k + 1}" for k in range(r0))
        self.e1_names = tuple(e1_names) if e1_names else tuple(f"v{k + 1}" for k in range(r1))

    @property
    def rank0(self) -> int:
        return self.boundary.source_rank

    @property
    def rank1(self) -> int:
        return self.boundary.target_rank

    def replace(self, **changes) -> "TwoRep":
        fields = dict(acting=self.acting, boundary=self.boundary, conn0=self.conn0, conn1=self.conn1,
                      curv=self.curv, e0_names=self.e0_names, e1_names=self.e1_names)
        fields.update(changes)
        return TwoRep(**fields)

    def __eq__(self, other) -> bool:
        return (isinstance(other, TwoRep) and self.boundary == other.boundary and self.conn0 == other.conn0
                and self.conn1 == other.conn1 and self.curv == other.curv)

    def __hash__(self) -> int:
        return hash(self.boundary)

    def __repr__(self) -> str:
        return f"TwoRep({self.acting.name}: {self.rank0} -> {self.rank1})"


def validate_two_rep(t: TwoRep) -> Report:
    alg = t.acting
    dim = alg.dim
    report = Report()
    e0 = [Section.basis(t.rank0, j, dim) for j in range(t.rank0)]
    lab = alg.label
    report.add(run_check(
        "two_rep.R1", "R2",
        (((lab(i), t.e0_names[j]),
          lambda i=i, j=j: t.boundary.apply(t.conn0.on_basis(i, e0[j])) - t.conn1.on_basis(i, t.boundary.apply(e0[j])))
         for i in range(alg.rank) for j in range(t.rank0)),
    ))
    r0 = curvature(t.conn0)
    r1 = curvature(t.conn1)
    pairs = list(itertools.combinations(range(alg.rank), 2))
    report.add(run_check(
        "two_rep.R2.E0", "R3",
        (((lab(i), lab(j)), lambda i=i, j=j: r0.value((i, j)) - t.curv.value((i, j)).compose(t.boundary))
         for i, j in pairs),
    ))
    report.add(run_check(
        "two_rep.R2.E1", "R3",
        (((lab(i), lab(j)), lambda i=i, j=j: r1.value((i, j)) - t.boundary.compose(t.curv.value((i, j))))
         for i, j in pairs),
    ))
    dr = koszul_d((t.conn0, t.conn1), t.curv)
    report.add(run_check(
        "two_rep.R3", "R3",
        (((lab(i), lab(j), lab(k)), lambda idx=(i, j, k): dr.value(idx))
         for i, j, k in itertools.combinations(range(alg.rank), 3)),
    ))
    return report


def pullback_two_rep(phi: BundleMap, t: TwoRep, src: Algebroid) -> TwoRep:
    """Pull a 2-representation of the target of phi back to src."""
    if phi.source_rank != src.rank or phi.target_rank != t.acting.rank:
        raise InputError("pullback map does not match the algebroids")
    return TwoRep(
        src, t.boundary, t.conn0.pullback(phi, src), t.conn1.pullback(phi, src),
        t.curv.pullback(phi, src), t.e0_names, t.e1_names,
    )


@dataclass(frozen=True)
class TwoRepMorphism:
    """(phi0: E0 -> F0, phi1: E1 -> F1, phi), phi a 1-form with values in Hom(E1, F0)."""

    phi0: BundleMap
    phi1: BundleMap
    phi: HomValuedForm


def identity_morphism(t: TwoRep) -> TwoRepMorphism:
    dim = t.acting.dim
    return TwoRepMorphism(BundleMap.identity(t.rank0, dim), BundleMap.identity(t.rank1, dim),
                          HomValuedForm.zero(t.acting, 1, t.rank1, t.rank0))


def validate_two_rep_morphism(m: TwoRepMorphism, src: TwoRep, dst: TwoRep,
                              phi_a: BundleMap | None = None) -> Report:
    """Check (comp1)-(comp3) for m: src -> phi_a^* dst."""
    alg = src.acting
    if phi_a is not None:
        dst = pullback_two_rep(phi_a, dst, alg)
    elif dst.acting.rank != alg.rank:
        raise InputError("destination acts through a different algebroid; pass phi_a")
    if (m.phi0.source_rank, m.phi0.target_rank) != (src.rank0, dst.rank0):
        raise InputError("phi0 has the wrong shape")
    if (m.phi1.source_rank, m.phi1.target_rank) != (src.rank1, dst.rank1):
        raise InputError("phi1 has the wrong shape")
    if (m.phi.degree, m.phi.source_rank, m.phi.target_rank) != (1, src.rank1, dst.rank0):
        raise InputError("phi must be a 1-form with values in Hom(E1, F0)")
    report = Report()
    lab = alg.label
    d_e, d_f = src.boundary, dst.boundary
    report.add(run_check(
        "morphism.comp1", "comp1",
        (((src.e0_names[j],), lambda j=j: m.phi1.apply(d_e.column(j)) - d_f.apply(m.phi0.column(j)))
         for j in range(src.rank0)),
    ))
    report.add(run_check(
        "morphism.comp2.E0", "comp2",
        (((lab(i),), lambda i=i: hom_derivative(dst.conn0, src.conn0, i, m.phi0) - m.phi.value((i,)).compose(d_e))
         for i in range(alg.rank)),
    ))
    report.add(run_check(
        "morphism.comp2.E1", "comp2",
        (((lab(i),), lambda i=i: hom_derivative(dst.conn1, src.conn1, i, m.phi1) - d_f.compose(m.phi.value((i,))))
         for i in range(alg.rank)),
    ))
    dphi = koszul_d((dst.conn0, src.conn1), m.phi)

    def comp3(idx):
        rhs = dst.curv.value(idx).compose(m.phi1) - m.phi0.compose(src.curv.value(idx))
        return dphi.value(idx) - rhs

    report.add(run_check(
        "morphism.comp3", "comp3",
        (((lab(i), lab(j)), lambda idx=(i, j): comp3(idx))
         for i, j in itertools.combinations(range(alg.rank), 2)),
    ))
    return report


def change_splitting(t: TwoRep, omega: HomValuedForm, verify: bool = True) -> TwoRep:
    """Re-express t in the splitting shifted by omega (a Hom(E1, E0)-valued 1-form).

    The new data is nabla0 + omega o boundary, nabla1 + boundary o omega and
    R + d omega, where d uses the Hom connection of the new nabla0 and the
    old nabla1. With ``verify`` the input, the output and the identity-sided
    morphism (id, id, omega) are all validated.
    """
    alg = t.acting
    if (omega.degree, omega.source_rank, omega.target_rank) != (1, t.rank1, t.rank0):
        raise InputError("splitting change must be a Hom(E1, E0)-valued 1-form")
    if verify:
        pre = validate_two_rep(t)
        if not pre.ok:
            raise RefusalError("change_splitting needs a valid 2-representation", pre)
    d = t.boundary
    conn0 = Connection.from_operator(
        alg, t.rank0,
        lambda i, j: t.conn0.gamma(i, j) + omega.value((i,)).apply(d.column(j)),
    )
    conn1 = Connection.from_operator(
        alg, t.rank1,
        lambda i, j: t.conn1.gamma(i, j) + d.apply(omega.value((i,)).column(j)),
    )
    curv = t.curv + koszul_d((conn0, t.conn1), omega)
    out = t.replace(conn0=conn0, conn1=conn1, curv=curv)
    if verify:
        post = validate_two_rep(out)
        dim = alg.dim
        post.extend(validate_two_rep_morphism(
            TwoRepMorphism(BundleMap.identity(t.rank0, dim), BundleMap.identity(t.rank1, dim), omega), t, out))
        if not post.ok:
            raise RefusalError("splitting change failed verification", post)
    return out
