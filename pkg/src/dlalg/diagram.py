"""Core diagrams, crossed modules and morphisms of core diagrams."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import _linalg
from .algebroid import (
    Algebroid,
    BundleMap,
    Connection,
    Section,
    curvature,
    surjectivity_certificate,
    validate_algebroid_morphism,
)
from .errors import InputError
from .report import Report, run_check, skipped, verdict


@dataclass(eq=False)
class CoreDiagram:
    """Lie algebroid C with core-anchors delA: C -> A and delB: C -> B.

    ``kerA_frame`` spans C^A = ker delB and ``kerB_frame`` spans
    C^B = ker delA. The right inverses are optional choices.
    """

    C: Algebroid
    A: Algebroid
    B: Algebroid
    delA: BundleMap
    delB: BundleMap
    kerA_frame: list[Section] = field(default_factory=list)
    kerB_frame: list[Section] = field(default_factory=list)
    sigmaA: BundleMap | None = None
    sigmaB: BundleMap | None = None
    name: str = ""

    def __post_init__(self):
        C, A, B = self.C, self.A, self.B
        if not (C.dim == A.dim == B.dim):
            raise InputError("core diagram algebroids live on different charts")
        if (self.delA.source_rank, self.delA.target_rank) != (C.rank, A.rank):
            raise InputError("delA must map C to A")
        if (self.delB.source_rank, self.delB.target_rank) != (C.rank, B.rank):
            raise InputError("delB must map C to B")
        for g in list(self.kerA_frame) + list(self.kerB_frame):
            if g.rank != C.rank:
                raise InputError("kernel frame element has the wrong rank")
        if self.sigmaA is not None and (self.sigmaA.source_rank, self.sigmaA.target_rank) != (A.rank, C.rank):
            raise InputError("sigmaA must map A to C")
        if self.sigmaB is not None and (self.sigmaB.source_rank, self.sigmaB.target_rank) != (B.rank, C.rank):
            raise InputError("sigmaB must map B to C")
        self.kerA_frame = list(self.kerA_frame)
        self.kerB_frame = list(self.kerB_frame)

    @property
    def dim(self) -> int:
        return self.C.dim

    def label(self, g: Section) -> str:
        return g.format(self.C.basis_names, self.C.chart.var_names)

    def with_choices(self, **changes) -> "CoreDiagram":
        fields_ = dict(C=self.C, A=self.A, B=self.B, delA=self.delA, delB=self.delB,
                       kerA_frame=self.kerA_frame, kerB_frame=self.kerB_frame,
                       sigmaA=self.sigmaA, sigmaB=self.sigmaB, name=self.name)
        fields_.update(changes)
        return CoreDiagram(**fields_)


def diagram_mismatch(cd1: CoreDiagram, cd2: CoreDiagram) -> str | None:
    """First differing structural datum, or None when the diagrams agree.

    Compared: the three algebroids (rank, anchor, brackets) and both
    core-anchors. Kernel frames and right inverses are choices and are not
    compared.
    """
    for label in ("C", "A", "B"):
        x, y = getattr(cd1, label), getattr(cd2, label)
        if x.rank != y.rank or x.dim != y.dim:
            return f"{label}.rank"
        if x.anchor != y.anchor:
            return f"{label}.anchor"
        if x.structure != y.structure:
            for key in sorted(set(x.structure) | set(y.structure)):
                if x.struct(*key) != y.struct(*key):
                    return f"{label}.bracket({x.label(key[0])},{x.label(key[1])})"
    if cd1.delA != cd2.delA:
        return "delA"
    if cd1.delB != cd2.delB:
        return "delB"
    return None


def kernel_frame(phi: BundleMap) -> list[Section]:
    """Frame of ker phi for a constant matrix."""
    if not phi.is_constant():
        raise InputError("kernel frames of non-constant maps must be supplied")
    vecs = _linalg.nullspace(phi.constant_matrix(), phi.source_rank)
    return [Section(v, phi.dim) for v in vecs]


def right_inverse(phi: BundleMap, name: str = "sigma") -> BundleMap | None:
    """A right inverse of a constant surjective map, or None."""
    if not phi.is_constant():
        raise InputError("right inverses of non-constant maps must be supplied")
    inv = _linalg.right_inverse(phi.constant_matrix(), phi.source_rank)
    if inv is None:
        return None
    return BundleMap(inv, phi.target_rank, phi.source_rank, phi.dim, name)


class FrameCoordinates:
    """Coordinates with respect to a constant frame of a subbundle."""

    def __init__(self, frame: Sequence[Section], ambient_rank: int, dim: int):
        self.frame = list(frame)
        self.rank = len(self.frame)
        self.ambient_rank = ambient_rank
        self.dim = dim
        cols = []
        for g in self.frame:
            if not all(c.is_constant() for c in g.comps):
                raise InputError("frame coordinates need a frame with constant coefficients")
            cols.append([c.constant_value() for c in g.comps])
        left = _linalg.left_inverse(cols, ambient_rank)
        if left is None:
            raise InputError("kernel frame is linearly dependent")
        self.left = BundleMap(left, ambient_rank, self.rank, dim)
        self.inclusion = BundleMap.from_columns(self.frame, ambient_rank, dim) if self.frame else \
            BundleMap.zero(0, ambient_rank, dim)

    def coords(self, v: Section) -> Section | None:
        """Coordinates of v, or None when v is not in the span."""
        x = self.left.apply(v)
        if self.inclusion.apply(x) != v:
            return None
        return x

    def require(self, v: Section, what: str) -> Section:
        x = self.coords(v)
        if x is None:
            raise InputError(f"{what} does not lie in the span of the kernel frame")
        return x


def validate_core_diagram(cd: CoreDiagram, samples: Sequence[Sequence] | None = None) -> Report:
    report = Report()
    C = cd.C
    report.extend(validate_algebroid_morphism(cd.delA, C, cd.A), prefix="core_diagram.delA.")
    report.extend(validate_algebroid_morphism(cd.delB, C, cd.B), prefix="core_diagram.delB.")
    report.add(run_check(
        "core_diagram.kerA_frame", "df:cd",
        (((cd.label(g),), lambda g=g: cd.delB.apply(g)) for g in cd.kerA_frame),
    ))
    report.add(run_check(
        "core_diagram.kerB_frame", "df:cd",
        (((cd.label(g),), lambda g=g: cd.delA.apply(g)) for g in cd.kerB_frame),
    ))
    report.add(run_check(
        "core_diagram.commuting_kernels", "df:cd",
        (((cd.label(g), cd.label(h)), lambda g=g, h=h: C.bracket(g, h))
         for g in cd.kerA_frame for h in cd.kerB_frame),
        cd.label,
    ))
    for side, phi, frame, kname in (("A", cd.delA, cd.kerB_frame, "kerB_frame"),
                                    ("B", cd.delB, cd.kerA_frame, "kerA_frame")):
        ok, kind, ranks = surjectivity_certificate(phi, samples)
        report.add(verdict(f"core_diagram.transitive.del{side}", "transitive", ok,
                           counterexample=("rank",) + tuple(str(r) for r in ranks),
                           detail=f"{kind} certificate; ranks={ranks}"))
        independent = True
        if frame:
            fm = BundleMap.from_columns(frame, C.rank, C.dim)
            independent, _, _ = surjectivity_certificate(fm.transpose(), samples)
        complementary = len(frame) + phi.target_rank == C.rank if ok else True
        report.add(verdict(f"core_diagram.{kname}.complement", "df:cd", independent and complementary,
                           detail="independent frame of complementary rank"))
    for side, sigma, phi in (("A", cd.sigmaA, cd.delA), ("B", cd.sigmaB, cd.delB)):
        if sigma is None:
            report.add(skipped(f"core_diagram.sigma{side}.right_inverse", "df:cd", "no right inverse supplied"))
            continue
        ident = BundleMap.identity(phi.target_rank, C.dim)
        comp = phi.compose(sigma)
        bad = next((j for j in range(phi.target_rank) if comp.column(j) != ident.column(j)), None)
        other = cd.A if side == "A" else cd.B
        report.add(verdict(f"core_diagram.sigma{side}.right_inverse", "df:cd", bad is None,
                           counterexample=(other.label(bad),) if bad is not None else None))
    return report


@dataclass(eq=False)
class CrossedModule:
    """(A, Cker, del, nablaA); ``frame`` embeds Cker in the core when known."""

    A: Algebroid
    Cker: Algebroid
    delta: BundleMap
    nablaA: Connection
    frame: list[Section] | None = None


def _check_sigma(sigma: BundleMap | None, phi: BundleMap, side: str) -> BundleMap:
    if sigma is None:
        raise InputError(f"crossed module on side {side} needs sigma{side}")
    comp = phi.compose(sigma)
    if comp != BundleMap.identity(phi.target_rank, phi.dim):
        raise InputError(f"sigma{side} is not a right inverse of del{side}")
    return sigma


def crossed_module_from_diagram(cd: CoreDiagram, side: str = "A") -> CrossedModule:
    """The crossed module on ker delB (side A) or ker delA (side B).

    The action is a -> [sigma(a), gamma] in the core, read in frame
    coordinates.
    """
    if side == "A":
        base, frame, delta, sigma = cd.A, cd.kerA_frame, cd.delA, cd.sigmaA
    elif side == "B":
        base, frame, delta, sigma = cd.B, cd.kerB_frame, cd.delB, cd.sigmaB
    else:
        raise InputError(f"side must be A or B, got {side!r}")
    sigma = _check_sigma(sigma, delta, side)
    C = cd.C
    dim = C.dim
    fc = FrameCoordinates(frame, C.rank, dim)
    r = fc.rank
    names = [cd.label(g) for g in frame]
    structure = {}
    for s, t in itertools.combinations(range(r), 2):
        structure[(s, t)] = fc.require(C.bracket(frame[s], frame[t]), f"[{names[s]},{names[t]}]")
    cker = Algebroid(f"{C.name}^{side}", C.chart, r, None, structure, names)
    del_map = BundleMap.from_columns([delta.apply(g) for g in frame], base.rank, dim) if r else \
        BundleMap.zero(0, base.rank, dim)
    lifts = [sigma.column(i) for i in range(base.rank)]
    nabla = Connection.from_operator(
        base, r, lambda i, s: fc.require(C.bracket(lifts[i], frame[s]), f"[sigma({base.label(i)}),{names[s]}]"))
    return CrossedModule(base, cker, del_map, nabla, list(frame))


def validate_crossed_module(xm: CrossedModule) -> Report:
    A, K, nabla, d = xm.A, xm.Cker, xm.nablaA, xm.delta
    report = Report()
    fa, fk = A.frame(), K.frame()
    la, lk = A.label, K.label
    report.add(verdict("xm.anchor_zero", "df:xm",
                       all(x.is_zero() for row in K.anchor for x in row)))
    report.add(run_check(
        "xm.old_2a", "old_2a",
        (((la(i), lk(s), lk(t)),
          lambda i=i, s=s, t=t: nabla.on_basis(i, K.bracket(fk[s], fk[t]))
          - K.bracket(nabla.on_basis(i, fk[s]), fk[t]) - K.bracket(fk[s], nabla.on_basis(i, fk[t])))
         for i in range(A.rank) for s, t in itertools.combinations(range(K.rank), 2)),
    ))
    report.add(run_check(
        "xm.old_2b", "old_2b",
        (((lk(s), lk(t)), lambda s=s, t=t: nabla.apply(d.apply(fk[s]), fk[t]) - K.bracket(fk[s], fk[t]))
         for s in range(K.rank) for t in range(K.rank)),
    ))
    report.add(run_check(
        "xm.old_2c", "old_2c",
        (((la(i), lk(s)), lambda i=i, s=s: d.apply(nabla.on_basis(i, fk[s])) - A.bracket(fa[i], d.apply(fk[s])))
         for i in range(A.rank) for s in range(K.rank)),
    ))
    curv = curvature(nabla)
    report.add(run_check(
        "xm.flat", "prop:xm",
        (((la(i), la(j)), lambda i=i, j=j: curv.value((i, j)))
         for i, j in itertools.combinations(range(A.rank), 2)),
    ))
    return report


@dataclass(frozen=True)
class DiagramMorphism:
    phiA: BundleMap
    phiB: BundleMap
    phiC: BundleMap


def validate_diagram_morphism(m: DiagramMorphism, src: CoreDiagram, dst: CoreDiagram) -> Report:
    report = Report()
    for leg, phi, s, t in (("phiA", m.phiA, src.A, dst.A), ("phiB", m.phiB, src.B, dst.B),
                           ("phiC", m.phiC, src.C, dst.C)):
        report.extend(validate_algebroid_morphism(phi, s, t), prefix=f"diagram_morphism.{leg}.")
    fc = src.C.frame()
    report.add(run_check(
        "diagram_morphism.square.A", "df:mcd",
        (((src.C.label(k),), lambda k=k: dst.delA.apply(m.phiC.apply(fc[k])) - m.phiA.apply(src.delA.apply(fc[k])))
         for k in range(src.C.rank)),
    ))
    report.add(run_check(
        "diagram_morphism.square.B", "df:mcd",
        (((src.C.label(k),), lambda k=k: dst.delB.apply(m.phiC.apply(fc[k])) - m.phiB.apply(src.delB.apply(fc[k])))
         for k in range(src.C.rank)),
    ))
    for side in ("A", "B"):
        s_frame = src.kerA_frame if side == "A" else src.kerB_frame
        d_frame = dst.kerA_frame if side == "A" else dst.kerB_frame
        coords = FrameCoordinates(d_frame, dst.C.rank, dst.dim)
        report.add(run_check(
            f"diagram_morphism.kernel.{side}", "df:mcd",
            (((src.label(g),), lambda g=g: coords.coords(m.phiC.apply(g)) is None) for g in s_frame),
        ))
    for side in ("A", "B"):
        s_sigma = src.sigmaA if side == "A" else src.sigmaB
        d_sigma = dst.sigmaA if side == "A" else dst.sigmaB
        if s_sigma is None or d_sigma is None:
            report.add(skipped(f"diagram_morphism.crossed_module.{side}", "prop:xm", "right inverses not supplied"))
            continue
        base = src.A if side == "A" else src.B
        phi_side = m.phiA if side == "A" else m.phiB
        frame = src.kerA_frame if side == "A" else src.kerB_frame

        def defect(i, g, s_sigma=s_sigma, d_sigma=d_sigma, base=base, phi_side=phi_side):
            lhs = m.phiC.apply(src.C.bracket(s_sigma.column(i), g))
            rhs = dst.C.bracket(d_sigma.apply(phi_side.column(i)), m.phiC.apply(g))
            return lhs - rhs

        report.add(run_check(
            f"diagram_morphism.crossed_module.{side}", "prop:xm",
            (((base.label(i), src.label(g)), lambda i=i, g=g, defect=defect: defect(i, g))
             for i in range(base.rank) for g in frame),
        ))
    return report


__all__ = [
    "CoreDiagram",
    "CrossedModule",
    "DiagramMorphism",
    "FrameCoordinates",
    "crossed_module_from_diagram",
    "diagram_mismatch",
    "kernel_frame",
    "right_inverse",
    "validate_core_diagram",
    "validate_crossed_module",
    "validate_diagram_morphism",
]
