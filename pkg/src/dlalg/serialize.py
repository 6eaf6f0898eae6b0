"""JSON documents holding named algebroids, maps, connections, 2-representations,
split double Lie algebroids, core diagrams and morphisms.

Serialization is canonical: keys sorted, two-space indent, trailing newline,
polynomial terms in descending graded-lex order, form values by index. Sub-objects
are stored once and referenced by name.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .algebroid import Algebroid, BundleMap, Chart, Connection, HomValuedForm, Section
from .diagram import CoreDiagram, DiagramMorphism
from .errors import InputError
from .exactpoly import Polynomial
from .matched import DLAMorphism, SplitDLA
from .rep2 import TwoRep, TwoRepMorphism

FORMAT_VERSION = "1"

SECTIONS = ("algebroids", "bundle_maps", "connections", "two_reps", "split_dlas", "core_diagrams", "morphisms")


@dataclass
class AlgebroidMorphism:
    phi: BundleMap
    source: Algebroid
    target: Algebroid


@dataclass
class TwoRepMorphismEntry:
    morphism: TwoRepMorphism
    source: TwoRep
    target: TwoRep
    phi_a: BundleMap | None = None


@dataclass
class DLAMorphismEntry:
    morphism: DLAMorphism
    source: SplitDLA
    target: SplitDLA


@dataclass
class DiagramMorphismEntry:
    morphism: DiagramMorphism
    source: CoreDiagram
    target: CoreDiagram


@dataclass
class Document:
    chart: Chart
    algebroids: dict[str, Algebroid] = field(default_factory=dict)
    bundle_maps: dict[str, BundleMap] = field(default_factory=dict)
    connections: dict[str, Connection] = field(default_factory=dict)
    two_reps: dict[str, TwoRep] = field(default_factory=dict)
    split_dlas: dict[str, SplitDLA] = field(default_factory=dict)
    core_diagrams: dict[str, CoreDiagram] = field(default_factory=dict)
    morphisms: dict[str, Any] = field(default_factory=dict)
    format_version: str = FORMAT_VERSION

    def get(self, section: str, name: str):
        table = getattr(self, section)
        if name not in table:
            known = ", ".join(sorted(table)) or "none"
            raise InputError(f"no entry {name!r} in {section} (known: {known})")
        return table[name]

    def only(self, section: str, name: str | None = None):
        """The named entry, or the single entry of a section."""
        if name is not None:
            return self.get(section, name)
        table = getattr(self, section)
        if len(table) != 1:
            raise InputError(f"document has {len(table)} {section}; name one explicitly")
        return next(iter(table.values()))


# encoding

def _poly(p: Polynomial) -> list:
    return p.to_json()


def _matrix(m: BundleMap) -> dict:
    return {"source_rank": m.source_rank, "target_rank": m.target_rank, "matrix": m.to_json()}


def _form(f: HomValuedForm) -> dict:
    return {"degree": f.degree, "source_rank": f.source_rank, "target_rank": f.target_rank,
            "values": f.to_json()}


def _section(s: Section) -> list:
    return s.to_json()


class _Writer:
    """Assigns names to objects, reusing a name when the payload repeats."""

    def __init__(self, chart: Chart):
        self.chart = chart
        self.out: dict[str, dict[str, Any]] = {k: {} for k in SECTIONS}
        self._seen: dict[str, dict[str, str]] = {k: {} for k in SECTIONS}

    def _put(self, section: str, preferred: str, payload: dict, exact: bool = False) -> str:
        key = json.dumps(payload, sort_keys=True)
        seen = self._seen[section]
        if exact:
            # top-level entries keep their own names
            self.out[section][preferred] = payload
            seen.setdefault(key, preferred)
            return preferred
        if key in seen:
            return seen[key]
        name = preferred or section[:-1]
        n = 2
        while name in self.out[section]:
            name = f"{preferred}#{n}"
            n += 1
        self.out[section][name] = payload
        seen[key] = name
        return name

    def algebroid(self, a: Algebroid, name: str | None = None, exact: bool = False) -> str:
        if a.dim != self.chart.dim:
            raise InputError(f"algebroid {a.name!r} lives on a chart of dimension {a.dim}, not {self.chart.dim}")
        payload = {
            "rank": a.rank,
            "basis": list(a.basis_names),
            "anchor": [[_poly(x) for x in row] for row in a.anchor],
            "structure": [{"i": i, "j": j, "value": _section(a.structure[(i, j)])}
                          for i, j in sorted(a.structure)],
        }
        return self._put("algebroids", name or a.name, payload, exact)

    def bundle_map(self, m: BundleMap, name: str | None = None, exact: bool = False) -> str:
        return self._put("bundle_maps", name or m.name or "map", _matrix(m), exact)

    def connection(self, c: Connection, name: str, exact: bool = False) -> str:
        payload = {"algebroid": self.algebroid(c.acting), "module_rank": c.module_rank,
                   "christoffel": c.to_json()}
        return self._put("connections", name, payload, exact)

    def two_rep(self, t: TwoRep, name: str, exact: bool = False) -> str:
        payload = {
            "algebroid": self.algebroid(t.acting),
            "boundary": self.bundle_map(t.boundary, f"{name}.boundary"),
            "conn0": self.connection(t.conn0, f"{name}.conn0"),
            "conn1": self.connection(t.conn1, f"{name}.conn1"),
            "curvature": _form(t.curv),
            "e0_names": list(t.e0_names),
            "e1_names": list(t.e1_names),
        }
        return self._put("two_reps", name, payload, exact)

    def split_dla(self, s: SplitDLA, name: str | None = None, exact: bool = False) -> str:
        name = name or s.name or "split"
        payload = {
            "A": self.algebroid(s.A),
            "B": self.algebroid(s.B),
            "trepA": self.two_rep(s.trepA, f"{name}.trepA"),
            "trepB": self.two_rep(s.trepB, f"{name}.trepB"),
            "core_basis": list(s.C_names),
        }
        return self._put("split_dlas", name, payload, exact)

    def core_diagram(self, cd: CoreDiagram, name: str | None = None, exact: bool = False) -> str:
        name = name or cd.name or "diagram"
        payload = {
            "C": self.algebroid(cd.C),
            "A": self.algebroid(cd.A),
            "B": self.algebroid(cd.B),
            "delA": self.bundle_map(cd.delA, f"{name}.delA"),
            "delB": self.bundle_map(cd.delB, f"{name}.delB"),
            "kerA_frame": [_section(g) for g in cd.kerA_frame],
            "kerB_frame": [_section(g) for g in cd.kerB_frame],
            "sigmaA": self.bundle_map(cd.sigmaA, f"{name}.sigmaA") if cd.sigmaA is not None else None,
            "sigmaB": self.bundle_map(cd.sigmaB, f"{name}.sigmaB") if cd.sigmaB is not None else None,
        }
        return self._put("core_diagrams", name, payload, exact)

    def morphism(self, m, name: str, exact: bool = False) -> str:
        if isinstance(m, AlgebroidMorphism):
            payload = {"kind": "algebroid", "map": self.bundle_map(m.phi, f"{name}.map"),
                       "source": self.algebroid(m.source), "target": self.algebroid(m.target)}
        elif isinstance(m, TwoRepMorphismEntry):
            payload = {"kind": "two_rep",
                       "source": self.two_rep(m.source, f"{name}.source"),
                       "target": self.two_rep(m.target, f"{name}.target"),
                       "phi0": self.bundle_map(m.morphism.phi0, f"{name}.phi0"),
                       "phi1": self.bundle_map(m.morphism.phi1, f"{name}.phi1"),
                       "form": _form(m.morphism.phi),
                       "phi_a": self.bundle_map(m.phi_a, f"{name}.phi_a") if m.phi_a is not None else None}
        elif isinstance(m, DLAMorphismEntry):
            payload = {"kind": "dla",
                       "source": self.split_dla(m.source, f"{name}.source"),
                       "target": self.split_dla(m.target, f"{name}.target"),
                       "phiA": self.bundle_map(m.morphism.phiA, f"{name}.phiA"),
                       "phiB": self.bundle_map(m.morphism.phiB, f"{name}.phiB"),
                       "phiC": self.bundle_map(m.morphism.phiC, f"{name}.phiC"),
                       "form": _form(m.morphism.form)}
        elif isinstance(m, DiagramMorphismEntry):
            payload = {"kind": "diagram",
                       "source": self.core_diagram(m.source, f"{name}.source"),
                       "target": self.core_diagram(m.target, f"{name}.target"),
                       "phiA": self.bundle_map(m.morphism.phiA, f"{name}.phiA"),
                       "phiB": self.bundle_map(m.morphism.phiB, f"{name}.phiB"),
                       "phiC": self.bundle_map(m.morphism.phiC, f"{name}.phiC")}
        else:
            raise InputError(f"cannot serialize morphism of type {type(m).__name__}")
        return self._put("morphisms", name, payload, exact)


def document_to_json(doc: Document) -> dict:
    w = _Writer(doc.chart)
    # Named top-level objects first so that their names win over derived ones.
    for name, a in sorted(doc.algebroids.items()):
        w.algebroid(a, name, True)
    for name, m in sorted(doc.bundle_maps.items()):
        w.bundle_map(m, name, True)
    for name, c in sorted(doc.connections.items()):
        w.connection(c, name, True)
    for name, t in sorted(doc.two_reps.items()):
        w.two_rep(t, name, True)
    for name, s in sorted(doc.split_dlas.items()):
        w.split_dla(s, name, True)
    for name, cd in sorted(doc.core_diagrams.items()):
        w.core_diagram(cd, name, True)
    for name, m in sorted(doc.morphisms.items()):
        w.morphism(m, name, True)
    out: dict[str, Any] = {"format_version": doc.format_version,
                           "chart": {"dim": doc.chart.dim, "vars": list(doc.chart.var_names)}}
    out.update(w.out)
    return out


def serialize_document(doc: Document) -> str:
    return json.dumps(document_to_json(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# decoding

class _Reader:
    def __init__(self, data: dict):
        self.data = data
        chart = data.get("chart")
        if not isinstance(chart, dict) or not isinstance(chart.get("dim"), int):
            raise InputError("chart: expected an object with an integer 'dim'")
        self.chart = Chart(chart["dim"], tuple(chart.get("vars") or ()))
        self.dim = self.chart.dim
        self.doc = Document(self.chart, format_version=str(data.get("format_version", FORMAT_VERSION)))
        for section in SECTIONS:
            value = data.get(section, {})
            if not isinstance(value, dict):
                raise InputError(f"{section}: expected an object mapping names to entries")

    def raw(self, section: str) -> dict:
        return self.data.get(section, {})

    def _ref(self, section: str, name, path: str):
        table = getattr(self.doc, section)
        if not isinstance(name, str) or name not in table:
            # resolve lazily so entries may reference later ones in the same section
            if isinstance(name, str) and name in self.raw(section):
                return self._load(section, name)
            raise InputError(f"{path}: unresolved reference {name!r} in {section}")
        return table[name]

    def _field(self, entry: dict, key: str, path: str):
        if not isinstance(entry, dict):
            raise InputError(f"{path}: expected an object")
        if key not in entry:
            raise InputError(f"{path}: missing field {key!r}")
        return entry[key]

    def _p(self, data, path: str) -> Polynomial:
        try:
            return Polynomial.from_json(data, self.dim)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None

    def _int(self, entry, key, path) -> int:
        v = self._field(entry, key, path)
        if not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise InputError(f"{path}.{key}: expected a non-negative integer")
        return v

    def _list(self, v, path: str, n: int | None = None) -> list:
        if not isinstance(v, list):
            raise InputError(f"{path}: expected a list")
        if n is not None and len(v) != n:
            raise InputError(f"{path}: expected {n} entries, got {len(v)}")
        return v

    def _sec(self, v, rank: int, path: str) -> Section:
        comps = self._list(v, path, rank)
        return Section([self._p(c, f"{path}[{k}]") for k, c in enumerate(comps)], self.dim)

    def _mat(self, v, source_rank: int, target_rank: int, path: str, name: str = "") -> BundleMap:
        rows = self._list(v, path, target_rank)
        out = []
        for r, row in enumerate(rows):
            row = self._list(row, f"{path}[{r}]", source_rank)
            out.append([self._p(x, f"{path}[{r}][{c}]") for c, x in enumerate(row)])
        return BundleMap(out, source_rank, target_rank, self.dim, name)

    def _form(self, v, acting: Algebroid, path: str, degree=None, shape=None) -> HomValuedForm:
        d = self._int(v, "degree", path)
        s = self._int(v, "source_rank", path)
        t = self._int(v, "target_rank", path)
        if degree is not None and d != degree:
            raise InputError(f"{path}.degree: expected {degree}")
        if shape is not None and (s, t) != shape:
            raise InputError(f"{path}: expected values in Hom of ranks {shape}, got {(s, t)}")
        vals = {}
        for n, item in enumerate(self._list(self._field(v, "values", path), f"{path}.values")):
            ipath = f"{path}.values[{n}]"
            args = self._list(self._field(item, "args", ipath), f"{ipath}.args", d)
            if not all(isinstance(a, int) for a in args):
                raise InputError(f"{ipath}.args: expected integers")
            vals[tuple(args)] = self._mat(self._field(item, "value", ipath), s, t, f"{ipath}.value")
        try:
            return HomValuedForm(acting, d, s, t, vals)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None

    def _load(self, section: str, name: str):
        table = getattr(self.doc, section)
        if name in table:
            return table[name]
        entry = self.raw(section)[name]
        path = f"{section}.{name}"
        loader = getattr(self, f"_load_{section}")
        try:
            obj = loader(name, entry, path)
        except RecursionError:
            raise InputError(f"{path}: circular reference") from None
        table[name] = obj
        return obj

    def _load_algebroids(self, name, e, path):
        rank = self._int(e, "rank", path)
        basis = e.get("basis") or None
        anchor_raw = self._list(e.get("anchor", [[[] for _ in range(rank)] for _ in range(self.dim)]),
                                f"{path}.anchor", self.dim)
        anchor = []
        for u, row in enumerate(anchor_raw):
            row = self._list(row, f"{path}.anchor[{u}]", rank)
            anchor.append([self._p(x, f"{path}.anchor[{u}][{i}]") for i, x in enumerate(row)])
        structure = {}
        for n, item in enumerate(self._list(e.get("structure", []), f"{path}.structure")):
            ipath = f"{path}.structure[{n}]"
            i, j = self._field(item, "i", ipath), self._field(item, "j", ipath)
            if (i, j) in structure:
                raise InputError(f"{ipath}: repeated structure entry ({i}, {j})")
            structure[(i, j)] = self._sec(self._field(item, "value", ipath), rank, f"{ipath}.value")
        try:
            return Algebroid(name, self.chart, rank, anchor, structure, basis)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None

    def _load_bundle_maps(self, name, e, path):
        s = self._int(e, "source_rank", path)
        t = self._int(e, "target_rank", path)
        return self._mat(self._field(e, "matrix", path), s, t, f"{path}.matrix", name)

    def _load_connections(self, name, e, path):
        alg = self._ref("algebroids", self._field(e, "algebroid", path), f"{path}.algebroid")
        n = self._int(e, "module_rank", path)
        raw = self._list(self._field(e, "christoffel", path), f"{path}.christoffel", alg.rank)
        gam = []
        for i, block in enumerate(raw):
            block = self._list(block, f"{path}.christoffel[{i}]", n)
            rows = []
            for j, row in enumerate(block):
                row = self._list(row, f"{path}.christoffel[{i}][{j}]", n)
                rows.append([self._p(x, f"{path}.christoffel[{i}][{j}][{k}]") for k, x in enumerate(row)])
            gam.append(rows)
        return Connection(alg, n, gam)

    def _load_two_reps(self, name, e, path):
        alg = self._ref("algebroids", self._field(e, "algebroid", path), f"{path}.algebroid")
        bd = self._ref("bundle_maps", self._field(e, "boundary", path), f"{path}.boundary")
        c0 = self._ref("connections", self._field(e, "conn0", path), f"{path}.conn0")
        c1 = self._ref("connections", self._field(e, "conn1", path), f"{path}.conn1")
        curv = self._form(self._field(e, "curvature", path), alg, f"{path}.curvature", 2,
                          (bd.target_rank, bd.source_rank))
        try:
            return TwoRep(alg, bd, c0, c1, curv, e.get("e0_names"), e.get("e1_names"))
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None

    def _load_split_dlas(self, name, e, path):
        A = self._ref("algebroids", self._field(e, "A", path), f"{path}.A")
        B = self._ref("algebroids", self._field(e, "B", path), f"{path}.B")
        ta = self._ref("two_reps", self._field(e, "trepA", path), f"{path}.trepA")
        tb = self._ref("two_reps", self._field(e, "trepB", path), f"{path}.trepB")
        try:
            return SplitDLA(A, B, ta, tb, e.get("core_basis"), name=name)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None

    def _load_core_diagrams(self, name, e, path):
        C = self._ref("algebroids", self._field(e, "C", path), f"{path}.C")
        A = self._ref("algebroids", self._field(e, "A", path), f"{path}.A")
        B = self._ref("algebroids", self._field(e, "B", path), f"{path}.B")
        dA = self._ref("bundle_maps", self._field(e, "delA", path), f"{path}.delA")
        dB = self._ref("bundle_maps", self._field(e, "delB", path), f"{path}.delB")
        kA = [self._sec(g, C.rank, f"{path}.kerA_frame[{n}]")
              for n, g in enumerate(self._list(e.get("kerA_frame", []), f"{path}.kerA_frame"))]
        kB = [self._sec(g, C.rank, f"{path}.kerB_frame[{n}]")
              for n, g in enumerate(self._list(e.get("kerB_frame", []), f"{path}.kerB_frame"))]
        sA = self._ref("bundle_maps", e["sigmaA"], f"{path}.sigmaA") if e.get("sigmaA") is not None else None
        sB = self._ref("bundle_maps", e["sigmaB"], f"{path}.sigmaB") if e.get("sigmaB") is not None else None
        try:
            return CoreDiagram(C, A, B, dA, dB, kA, kB, sA, sB, name=name)
        except InputError as exc:
            raise InputError(f"{path}: {exc}") from None

    def _load_morphisms(self, name, e, path):
        kind = self._field(e, "kind", path)
        ref = lambda section, key: self._ref(section, self._field(e, key, path), f"{path}.{key}")  # noqa: E731
        if kind == "algebroid":
            return AlgebroidMorphism(ref("bundle_maps", "map"), ref("algebroids", "source"),
                                     ref("algebroids", "target"))
        if kind == "two_rep":
            src, dst = ref("two_reps", "source"), ref("two_reps", "target")
            form = self._form(self._field(e, "form", path), src.acting, f"{path}.form", 1,
                              (src.rank1, dst.rank0))
            phi_a = self._ref("bundle_maps", e["phi_a"], f"{path}.phi_a") if e.get("phi_a") is not None else None
            m = TwoRepMorphism(ref("bundle_maps", "phi0"), ref("bundle_maps", "phi1"), form)
            return TwoRepMorphismEntry(m, src, dst, phi_a)
        if kind == "dla":
            src, dst = ref("split_dlas", "source"), ref("split_dlas", "target")
            form = self._form(self._field(e, "form", path), src.A, f"{path}.form", 1, (src.B.rank, dst.C_rank))
            m = DLAMorphism(ref("bundle_maps", "phiA"), ref("bundle_maps", "phiB"), ref("bundle_maps", "phiC"), form)
            return DLAMorphismEntry(m, src, dst)
        if kind == "diagram":
            m = DiagramMorphism(ref("bundle_maps", "phiA"), ref("bundle_maps", "phiB"), ref("bundle_maps", "phiC"))
            return DiagramMorphismEntry(m, ref("core_diagrams", "source"), ref("core_diagrams", "target"))
        raise InputError(f"{path}.kind: unknown morphism kind {kind!r}")

    def read(self) -> Document:
        for section in SECTIONS:
            for name in sorted(self.raw(section)):
                self._load(section, name)
        return self.doc


def parse_document(text: str) -> Document:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError("document must be a JSON object")
    version = data.get("format_version", FORMAT_VERSION)
    if str(version) != FORMAT_VERSION:
        raise InputError(f"unsupported format_version {version!r}")
    return _Reader(data).read()


def load_document(path: str) -> Document:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_document(text)


def canonicalize(text: str) -> str:
    return serialize_document(parse_document(text))


def single(chart: Chart, **entries) -> Document:
    """A document holding the given named objects, e.g. ``single(chart, split_dlas={"S": s})``."""
    doc = Document(chart)
    for section, table in entries.items():
        if section not in SECTIONS:
            raise InputError(f"unknown document section {section!r}")
        getattr(doc, section).update(table)
    return doc


__all__ = ["AlgebroidMorphism", "DLAMorphismEntry", "DiagramMorphismEntry", "Document", "TwoRepMorphismEntry",
           "FORMAT_VERSION", "canonicalize", "document_to_json", "load_document", "parse_document",
           "serialize_document", "single"]
