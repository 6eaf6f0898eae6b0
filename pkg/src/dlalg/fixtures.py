"""Builders for the bundled example corpus and seeded random data.

Every builder returns fresh objects. Randomness always comes from a
``random.Random`` supplied by the caller (or seeded here), so sweeps replay.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .algebroid import Algebroid, BundleMap, Chart, Connection, Section, curvature
from .diagram import CoreDiagram, DiagramMorphism
from .errors import InputError
from .exactpoly import Polynomial
from .matched import SplitDLA
from .rep2 import TwoRep

POINT = Chart(0)
LINE = Chart(1, ("t",))


def _abelian(name: str, rank: int, basis, chart: Chart = POINT) -> Algebroid:
    return Algebroid(name, chart, rank, None, {}, basis)


def heis(name: str = "heis", basis=("x", "y", "z")) -> Algebroid:
    """Heisenberg algebra [x, y] = z."""
    return Algebroid(name, POINT, 3, None, {(0, 1): [0, 0, 1]}, basis)


def aff(name: str = "aff", basis=("a1", "a2")) -> Algebroid:
    """The affine algebra [a1, a2] = a2."""
    return Algebroid(name, POINT, 2, None, {(0, 1): [0, 1]}, basis)


def aff_pair(name: str = "C") -> Algebroid:
    return Algebroid(name, POINT, 4, None, {(0, 1): [0, 1, 0, 0], (2, 3): [0, 0, 0, 1]},
                     ("e1", "e2", "f1", "f2"))


def tline_algebroid(name: str = "A") -> Algebroid:
    """Rank one over the t-line with anchor d/dt."""
    return Algebroid(name, LINE, 1, [[1]], {}, ("e",))


def bad3() -> Algebroid:
    """[e1,e2] = e1, [e2,e3] = e2: [[e1,e2],e3] + [[e2,e3],e1] + [[e3,e1],e2] = -e1."""
    return Algebroid("bad3", POINT, 3, None, {(0, 1): [1, 0, 0], (1, 2): [0, 1, 0]}, ("e1", "e2", "e3"))


def _map(rows, source_rank: int, target_rank: int, dim: int = 0, name: str = "") -> BundleMap:
    return BundleMap(rows, source_rank, target_rank, dim, name)


def _sec(comps, dim: int = 0) -> Section:
    return Section(comps, dim)


# comma inputs: (delta, C, A)

def comma_input(name: str):
    if name == "ab2":
        C = _abelian("C", 2, ("c1", "c2"))
        A = _abelian("A", 1, ("a1",))
        return _map([[1, 0]], 2, 1, name="pr"), C, A
    if name in ("heis", "heis-ab"):
        C = heis("C")
        A = _abelian("A", 2, ("a1", "a2"))
        return _map([[1, 0, 0], [0, 1, 0]], 3, 2, name="ab"), C, A
    if name == "tline":
        C = tline_algebroid("C")
        A = tline_algebroid("A")
        return BundleMap.identity(1, 1, "id"), C, A
    if name == "pair-aff":
        C = aff_pair()
        A = aff("A", ("a1", "a2"))
        return _map([[1, 0, 0, 0], [0, 1, 0, 0]], 4, 2, name="pr1"), C, A
    raise InputError(f"no comma fixture named {name!r}")


COMMA_FIXTURES = ("ab2", "heis", "tline", "pair-aff")


# core diagrams

def ab2() -> CoreDiagram:
    C = _abelian("C", 2, ("c1", "c2"))
    A = _abelian("A", 1, ("a1",))
    B = _abelian("B", 1, ("b1",))
    return CoreDiagram(
        C, A, B, _map([[1, 0]], 2, 1, name="delA"), _map([[0, 1]], 2, 1, name="delB"),
        [_sec([1, 0])], [_sec([0, 1])],
        _map([[1], [0]], 1, 2, name="sigmaA"), _map([[0], [1]], 1, 2, name="sigmaB"), name="ab2")


def heis_id_ab() -> CoreDiagram:
    """delA = id: heis -> heis, delB = abelianization heis -> R^2."""
    C = heis("C")
    A = heis("A", ("X", "Y", "Z"))
    B = _abelian("B", 2, ("b1", "b2"))
    return CoreDiagram(
        C, A, B, BundleMap.identity(3, 0, "delA"), _map([[1, 0, 0], [0, 1, 0]], 3, 2, name="delB"),
        [_sec([0, 0, 1])], [],
        BundleMap.identity(3, 0, "sigmaA"), _map([[1, 0], [0, 1], [0, 0]], 2, 3, name="sigmaB"),
        name="heis-id-ab")


def heis_id_ab_alt_sigmaB() -> BundleMap:
    """b1 -> x + z, b2 -> y + 2z."""
    return _map([[1, 0], [0, 1], [1, 2]], 2, 3, name="sigmaB'")


def pair_aff() -> CoreDiagram:
    """C = aff + aff with delA, delB the two projections."""
    C = aff_pair()
    A = aff("A", ("a1", "a2"))
    B = aff("B", ("b1", "b2"))
    pr1 = _map([[1, 0, 0, 0], [0, 1, 0, 0]], 4, 2, name="delA")
    pr2 = _map([[0, 0, 1, 0], [0, 0, 0, 1]], 4, 2, name="delB")
    return CoreDiagram(
        C, A, B, pr1, pr2,
        [_sec([1, 0, 0, 0]), _sec([0, 1, 0, 0])], [_sec([0, 0, 1, 0]), _sec([0, 0, 0, 1])],
        _map([[1, 0], [0, 1], [0, 0], [0, 0]], 2, 4, name="sigmaA"),
        _map([[0, 0], [0, 0], [1, 0], [0, 1]], 2, 4, name="sigmaB"), name="pair-aff")


def pair_aff_alt_sigmaB() -> BundleMap:
    """b1 -> f1 + e2, b2 -> f2 + e1."""
    return _map([[0, 1], [1, 0], [1, 0], [0, 1]], 2, 4, name="sigmaB'")


def pair_aff_alt_sigmaA() -> BundleMap:
    """a1 -> e1 + f2, a2 -> e2 + f1 - f2: sigmaA shifted by a map into ker delA."""
    return _map([[1, 0], [0, 1], [0, 1], [1, -1]], 2, 4, name="sigmaA'")


def r2_id() -> CoreDiagram:
    """R^2 with both core-anchors the identity."""
    C = _abelian("C", 2, ("c1", "c2"))
    A = _abelian("A", 2, ("a1", "a2"))
    B = _abelian("B", 2, ("b1", "b2"))
    eye = [[1, 0], [0, 1]]
    return CoreDiagram(C, A, B, _map(eye, 2, 2, name="delA"), _map(eye, 2, 2, name="delB"), [], [],
                       _map(eye, 2, 2, name="sigmaA"), _map(eye, 2, 2, name="sigmaB"), name="r2-id")


def badker() -> CoreDiagram:
    """heis with delA killing y and delB killing x, so [x, y] = z breaks commuting kernels."""
    C = heis("C")
    A = _abelian("A", 1, ("a1",))
    B = _abelian("B", 1, ("b1",))
    return CoreDiagram(
        C, A, B, _map([[1, 0, 0]], 3, 1, name="delA"), _map([[0, 1, 0]], 3, 1, name="delB"),
        [_sec([1, 0, 0]), _sec([0, 0, 1])], [_sec([0, 1, 0]), _sec([0, 0, 1])], name="badker")


def badker_split() -> SplitDLA:
    """Split data whose core bracket is [x, y] = z while x spans ker delB and y spans ker delA."""
    C = heis("C")
    A = _abelian("A", 1, ("a1",))
    B = _abelian("B", 1, ("b1",))
    delA = _map([[1, 0, 0]], 3, 1, name="delA")
    delB = _map([[0, 1, 0]], 3, 1, name="delB")
    nAC = Connection(A, 3, [[[0, 0, 0], [0, 0, 1], [0, 0, 0]]])
    trepA = TwoRep(A, delB, nAC, Connection.zero(A, 1), curvature(nAC).precompose(BundleMap.zero(1, 3, 0)),
                   C.basis_names, B.basis_names)
    trepB = TwoRep(B, delA, Connection.zero(B, 3), Connection.zero(B, 1),
                   curvature(Connection.zero(B, 3)).precompose(BundleMap.zero(1, 3, 0)),
                   C.basis_names, A.basis_names)
    return SplitDLA(A, B, trepA, trepB, C.basis_names, name="badker")


def curvfix() -> TwoRep:
    """Line bundle over the t-line with nabla_{e1} u = 0, nabla_{e2} u = t u; R(e1, e2) = 1."""
    A = Algebroid("A", LINE, 2, [[1, 0]], {}, ("e1", "e2"))
    t = LINE.var(0)
    nabla = Connection(A, 1, [[[0]], [[t]]])
    return TwoRep(A, BundleMap.identity(1, 1, "id"), nabla, nabla, curvature(nabla), ("u",), ("v",))


def pair_aff_collapse() -> tuple[DiagramMorphism, CoreDiagram]:
    """Abelianize each aff factor: pair-aff -> ab2."""
    phiC = _map([[1, 0, 0, 0], [0, 0, 1, 0]], 4, 2, name="phiC")
    phiA = _map([[1, 0]], 2, 1, name="phiA")
    phiB = _map([[1, 0]], 2, 1, name="phiB")
    return DiagramMorphism(phiA, phiB, phiC), ab2()


def heis_abelianization() -> tuple[DiagramMorphism, CoreDiagram]:
    """heis-id-ab -> r2-id with abelianization on C and A and the identity on B."""
    ab = _map([[1, 0, 0], [0, 1, 0]], 3, 2, name="ab")
    return DiagramMorphism(ab, BundleMap.identity(2, 0, "id"), ab), r2_id()


def heis_ab_square():
    """Commuting square (phiC, phiA) from (ab: heis -> R^2) to (id: R^2 -> R^2)."""
    src = comma_input("heis")
    C2 = _abelian("C", 2, ("c1", "c2"))
    A2 = _abelian("A", 2, ("a1", "a2"))
    dst = (BundleMap.identity(2, 0, "id"), C2, A2)
    square = (_map([[1, 0, 0], [0, 1, 0]], 3, 2, name="ab"), BundleMap.identity(2, 0, "id"))
    return square, src, dst


QUOTIENT_FIXTURES = ("ab2", "heis-id-ab", "pair-aff")


def diagram(name: str) -> CoreDiagram:
    builders = {"ab2": ab2, "heis-id-ab": heis_id_ab, "pair-aff": pair_aff, "badker": badker, "r2-id": r2_id}
    if name not in builders:
        raise InputError(f"no core diagram fixture named {name!r}")
    return builders[name]()


# seeded random data

def random_rational(rng: random.Random, bound: int = 3) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_polynomial(rng: random.Random, dim: int, degree: int = 1) -> Polynomial:
    """Random rational polynomial of total degree at most 1 (degree 0 or 1)."""
    p = Polynomial.constant(random_rational(rng), dim)
    if degree >= 1:
        for u in range(dim):
            p = p + Polynomial.variable(u, dim).scale(random_rational(rng))
    return p


def random_section(rng: random.Random, rank: int, dim: int, degree: int = 1) -> Section:
    return Section([random_polynomial(rng, dim, degree) for _ in range(rank)], dim)


def random_connection(rng: random.Random, A: Algebroid, module_rank: int, degree: int = 1) -> Connection:
    gam = [[[random_polynomial(rng, A.dim, degree) for _ in range(module_rank)] for _ in range(module_rank)]
           for _ in range(A.rank)]
    return Connection(A, module_rank, gam)


def random_w(rng: random.Random, cd: CoreDiagram, degree: int = 1) -> list[list[Section]]:
    """Random values for the derivatives of the sigmaB frame, one C-section per (a_i, b_m)."""
    return [[random_section(rng, cd.C.rank, cd.dim, degree) for _ in range(cd.B.rank)] for _ in range(cd.A.rank)]


# the bundled corpus

def corpus_documents():
    """name -> Document for every corpus file."""
    from .comma import build_comma
    from .quotient import build_quotient, extend_connection
    from .diagram import crossed_module_from_diagram
    from .serialize import DiagramMorphismEntry, Document

    docs = {}
    docs["ab2"] = Document(POINT, core_diagrams={"ab2": ab2()})

    delta, C, A = comma_input("heis")
    docs["heis"] = Document(POINT, algebroids={"heis": C, "ab": A}, bundle_maps={"abelianization": delta},
                            split_dlas={"comma": build_comma(delta, C, A, Connection.zero(A, C.rank),
                                                             name="comma(heis->ab)")})

    docs["heis-id-ab"] = Document(POINT, core_diagrams={"heis-id-ab": heis_id_ab()},
                                  bundle_maps={"sigmaB_alt": heis_id_ab_alt_sigmaB()})

    cd = pair_aff()
    q = build_quotient(cd, extend_connection(cd, crossed_module_from_diagram(cd, "A")))
    dm, target = pair_aff_collapse()
    docs["pair-aff"] = Document(
        POINT, core_diagrams={"pair-aff": cd},
        bundle_maps={"sigmaA_alt": pair_aff_alt_sigmaA(), "sigmaB_alt": pair_aff_alt_sigmaB()},
        split_dlas={"quotient": q},
        morphisms={"collapse": DiagramMorphismEntry(dm, cd, target)})

    delta, C, A = comma_input("tline")
    docs["tline"] = Document(LINE, algebroids={"C": C, "A": A}, bundle_maps={"id": delta},
                             split_dlas={"comma": build_comma(delta, C, A, Connection.zero(A, 1),
                                                              name="comma(tline)")})

    docs["bad3"] = Document(POINT, algebroids={"bad3": bad3()})
    docs["badker"] = Document(POINT, core_diagrams={"badker": badker()}, split_dlas={"badker_split": badker_split()})
    docs["curvfix"] = Document(LINE, two_reps={"curvfix": curvfix()})
    return docs


# (corpus file, CLI arguments after the document path's command) for the golden reports
GOLDEN_RUNS = (
    ("ab2", ["validate", "core-diagram"]),
    ("ab2", ["build-quotient"]),
    ("heis", ["validate", "algebroid"]),
    ("heis", ["validate", "matched"]),
    ("heis-id-ab", ["validate", "core-diagram"]),
    ("heis-id-ab", ["validate", "crossed-module"]),
    ("heis-id-ab", ["build-quotient"]),
    ("pair-aff", ["validate", "core-diagram"]),
    ("pair-aff", ["validate", "crossed-module"]),
    ("pair-aff", ["roundtrip"]),
    ("pair-aff", ["morphism-check"]),
    ("tline", ["validate", "matched"]),
    ("bad3", ["validate", "algebroid"]),
    ("badker", ["validate", "core-diagram"]),
    ("curvfix", ["validate", "two-rep"]),
)
