"""The functor from transitive core diagrams to double Lie algebroids, canonical
isomorphisms between double Lie algebroids with one core diagram, and the
round-trip and naturality checks."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .algebroid import BundleMap, HomValuedForm, Section, surjectivity_certificate
from .diagram import (
    CoreDiagram,
    DiagramMorphism,
    crossed_module_from_diagram,
    diagram_mismatch,
    validate_core_diagram,
)
from .errors import InputError, RefusalError
from .matched import (
    DLAMorphism,
    SplitDLA,
    compose_dla_morphisms,
    extract_core_diagram,
    validate_dla_morphism,
)
from .quotient import build_quotient, extend_connection
from .report import Report, run_check, verdict


def functor_D(cd: CoreDiagram, nablaW: Sequence | None = None, check: bool = True) -> SplitDLA:
    """Crossed module on ker delB, extended connection, quotient."""
    xm = crossed_module_from_diagram(cd, "A")
    nabla = extend_connection(cd, xm, nablaW)
    return build_quotient(cd, nabla, cd.sigmaB, check=check, name=f"D({cd.name})")


def core_diagram_of(s: SplitDLA, sigmaB: BundleMap | None = None) -> CoreDiagram:
    cd = extract_core_diagram(s, check=False)
    return cd.with_choices(sigmaB=sigmaB) if sigmaB is not None else cd


@dataclass
class CanonicalIso:
    """phi(a, b) = nabla^1_a(sigmaB b) - nabla^2_a(sigmaB b).

    ``forward`` (s1 -> s2) carries the form -phi and ``backward`` (s2 -> s1)
    carries phi; both have identity legs.
    """

    phi: HomValuedForm | None
    forward: DLAMorphism | None
    backward: DLAMorphism | None
    report: Report

    @property
    def ok(self) -> bool:
        return self.report.ok


def gap_form(s1: SplitDLA, s2: SplitDLA, sigmaB: BundleMap) -> HomValuedForm:
    """(nabla^1 - nabla^2) contracted with sigmaB, a Hom(B, C)-valued 1-form on A."""
    n1, n2 = s1.nabla_AC, s2.nabla_AC
    fa = s1.A.frame()
    lifts = [sigmaB.column(m) for m in range(s1.B.rank)]

    def value(idx):
        (i,) = idx
        cols = [n1.apply(fa[i], lifts[m]) - n2.apply(fa[i], lifts[m]) for m in range(s1.B.rank)]
        return BundleMap.from_columns(cols, s1.C_rank, s1.dim)

    return HomValuedForm.from_function(s1.A, 1, s1.B.rank, s1.C_rank, value)


def canonical_iso(s1: SplitDLA, s2: SplitDLA, sigmaB: BundleMap | None = None) -> CanonicalIso:
    report = Report()
    cd1 = core_diagram_of(s1, sigmaB)
    cd2 = core_diagram_of(s2)
    diff = diagram_mismatch(cd1, cd2)
    report.add(verdict("iso.core_diagram", "iso_dvbs", diff is None,
                       counterexample=(diff,) if diff else None,
                       detail=f"first mismatch: {diff}" if diff else None))
    if diff is not None:
        return CanonicalIso(None, None, None, report)
    sigma = cd1.sigmaB
    if sigma is None:
        raise InputError("canonical_iso needs a right inverse of delB")
    if cd1.delB.compose(sigma) != BundleMap.identity(cd1.B.rank, cd1.dim):
        raise InputError("sigmaB is not a right inverse of delB")
    n1, n2 = s1.nabla_AC, s2.nabla_AC
    fa = s1.A.frame()
    report.add(run_check(
        "iso.sigma_independent", "iso_dvbs",
        (((s1.A.label(i), cd1.label(g)), lambda i=i, g=g: n1.apply(fa[i], g) - n2.apply(fa[i], g))
         for i in range(s1.A.rank) for g in cd1.kerA_frame),
    ))
    phi = gap_form(s1, s2, sigma)
    dim = s1.dim
    ids = (BundleMap.identity(s1.A.rank, dim), BundleMap.identity(s1.B.rank, dim),
           BundleMap.identity(s1.C_rank, dim))
    forward = DLAMorphism(*ids, -phi)
    backward = DLAMorphism(*ids, phi)
    report.extend(validate_dla_morphism(forward, s1, s2), prefix="iso.forward.")
    report.extend(validate_dla_morphism(backward, s2, s1), prefix="iso.backward.")
    return CanonicalIso(phi, forward, backward, report)


def _transitivity(cd: CoreDiagram, samples=None) -> Report:
    report = Report()
    for label, phi in (("delA", cd.delA), ("delB", cd.delB)):
        ok, kind, ranks = surjectivity_certificate(phi, samples)
        report.add(verdict(f"roundtrip.transitive.{label}", "eq_cat", ok,
                           detail=f"{kind} ranks {list(ranks)} of {phi.target_rank}"))
    return report


@dataclass
class RoundTrip:
    report: Report
    rebuilt: SplitDLA
    iso: CanonicalIso


def roundtrip(s: SplitDLA, nablaW: Sequence | None = None, sigmaA: BundleMap | None = None,
              sigmaB: BundleMap | None = None, samples=None) -> RoundTrip:
    """Leg (i): the core diagram of D(C(s)) is C(s). Leg (ii): D(C(s)) is canonically isomorphic to s."""
    cd = extract_core_diagram(s, sigmaA=sigmaA, sigmaB=sigmaB, check=False)
    trans = _transitivity(cd, samples)
    if not trans.ok:
        raise RefusalError("round trip needs a transitive double Lie algebroid", trans)
    report = Report()
    report.extend(trans)
    valid = validate_core_diagram(cd, samples)
    report.extend(valid, prefix="roundtrip.")
    if not valid.ok:
        raise RefusalError("extracted core diagram is invalid", report)
    rebuilt = functor_D(cd, nablaW)
    diff = diagram_mismatch(extract_core_diagram(rebuilt, check=False), cd)
    report.add(verdict("roundtrip.leg_i", "eq_cat", diff is None,
                       counterexample=(diff,) if diff else None,
                       detail=f"first mismatch: {diff}" if diff else None))
    iso = canonical_iso(rebuilt, s, cd.sigmaB)
    report.extend(iso.report, prefix="roundtrip.leg_ii.")
    return RoundTrip(report, rebuilt, iso)


def roundtrip_check(s: SplitDLA, nablaW: Sequence | None = None, sigmaA: BundleMap | None = None,
                    sigmaB: BundleMap | None = None, samples=None) -> Report:
    return roundtrip(s, nablaW, sigmaA, sigmaB, samples).report


def _induces(phi: DLAMorphism, m: DiagramMorphism) -> bool:
    return phi.phiA == m.phiA and phi.phiB == m.phiB and phi.phiC == m.phiC


def naturality_check(m: DiagramMorphism, sources: tuple[SplitDLA, SplitDLA], targets: tuple[SplitDLA, SplitDLA],
                     Phi1: DLAMorphism, Phi2: DLAMorphism) -> Report:
    """Phi2 o iso(s1, s2) = iso(s1', s2') o Phi1 for Phi1: s1 -> s1' and Phi2: s2 -> s2' inducing m."""
    s1, s2 = sources
    t1, t2 = targets
    if not (_induces(Phi1, m) and _induces(Phi2, m)):
        raise InputError("the two double Lie algebroid morphisms do not induce the given diagram morphism")
    if diagram_mismatch(core_diagram_of(s1), core_diagram_of(s2)) is not None:
        raise InputError("source double Lie algebroids have different core diagrams")
    if diagram_mismatch(core_diagram_of(t1), core_diagram_of(t2)) is not None:
        raise InputError("target double Lie algebroids have different core diagrams")
    report = Report()
    report.extend(validate_dla_morphism(Phi1, s1, t1), prefix="naturality.Phi1.")
    report.extend(validate_dla_morphism(Phi2, s2, t2), prefix="naturality.Phi2.")
    iso_s = canonical_iso(s1, s2)
    iso_t = canonical_iso(t1, t2)
    report.extend(iso_s.report, prefix="naturality.source_")
    report.extend(iso_t.report, prefix="naturality.target_")
    if not (iso_s.ok and iso_t.ok):
        return report
    left = compose_dla_morphisms(Phi2, iso_s.forward, s1)
    right = compose_dla_morphisms(iso_t.forward, Phi1, s1)
    fa = s1.A.frame()
    fb = s1.B.frame()
    report.add(run_check(
        "naturality.square", "iso_dvbs",
        (((s1.A.label(i), s1.B.label(j)),
          lambda i=i, j=j: left.form.apply([fa[i]], fb[j]) - right.form.apply([fa[i]], fb[j]))
         for i in range(s1.A.rank) for j in range(s1.B.rank)),
    ))
    return report


__all__ = ["CanonicalIso", "RoundTrip", "canonical_iso", "core_diagram_of", "functor_D", "gap_form",
           "naturality_check", "roundtrip", "roundtrip_check"]
