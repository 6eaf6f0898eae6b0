"""Command-line entry point ``dlalg``.

Exit codes: 0 when every check passes, 1 when a check fails (or a
construction is refused on failed preconditions), 2 on input or parse errors.
Random data comes from ``random.Random(seed)``.
"""
from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from . import fixtures
from .algebroid import Connection, validate_algebroid, validate_algebroid_morphism
from .comma import build_comma
from .diagram import (
    crossed_module_from_diagram,
    validate_core_diagram,
    validate_crossed_module,
    validate_diagram_morphism,
)
from .equivalence import roundtrip
from .errors import InputError, RefusalError
from .matched import extract_core_diagram, validate_dla_morphism, validate_matched_pair
from .quotient import build_quotient, build_quotient_morphism, extend_connection, quotient_projection_check
from .rep2 import validate_two_rep, validate_two_rep_morphism
from .report import Report
from .serialize import (
    AlgebroidMorphism,
    DiagramMorphismEntry,
    DLAMorphismEntry,
    Document,
    TwoRepMorphismEntry,
    load_document,
    serialize_document,
)

VALIDATE_KINDS = ("algebroid", "two-rep", "matched", "core-diagram", "crossed-module", "morphism")


def parse_samples(text: str | None):
    """'0,1;1/2,3' -> [(0, 1), (1/2, 3)]."""
    if not text:
        return None
    points = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            points.append(tuple(Fraction(x.strip()) for x in chunk.split(",")))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"bad sample point {chunk!r}") from None
    return points


def _check_samples(samples, dim: int):
    if samples is not None and any(len(p) != dim for p in samples):
        raise InputError(f"sample points must have {dim} coordinates")
    return samples


def _selected(doc: Document, section: str, name: str | None) -> list[tuple[str, object]]:
    table = getattr(doc, section)
    if name is not None:
        return [(name, doc.get(section, name))]
    if not table:
        raise InputError(f"document has no {section}")
    return sorted(table.items())


def _merge(report: Report, items, fn) -> Report:
    for name, obj in items:
        report.extend(fn(obj), prefix=f"{name}." if len(items) > 1 else "")
    return report


def _validate_morphism(entry) -> Report:
    if isinstance(entry, AlgebroidMorphism):
        return validate_algebroid_morphism(entry.phi, entry.source, entry.target)
    if isinstance(entry, TwoRepMorphismEntry):
        return validate_two_rep_morphism(entry.morphism, entry.source, entry.target, entry.phi_a)
    if isinstance(entry, DLAMorphismEntry):
        return validate_dla_morphism(entry.morphism, entry.source, entry.target)
    if isinstance(entry, DiagramMorphismEntry):
        return validate_diagram_morphism(entry.morphism, entry.source, entry.target)
    raise InputError(f"unknown morphism entry {type(entry).__name__}")


def cmd_validate(args, doc: Document):
    samples = _check_samples(args.samples, doc.chart.dim)
    report = Report()
    kind = args.kind
    if kind == "algebroid":
        _merge(report, _selected(doc, "algebroids", args.name), validate_algebroid)
    elif kind == "two-rep":
        _merge(report, _selected(doc, "two_reps", args.name), validate_two_rep)
    elif kind == "matched":
        _merge(report, _selected(doc, "split_dlas", args.name), validate_matched_pair)
    elif kind == "core-diagram":
        _merge(report, _selected(doc, "core_diagrams", args.name), lambda cd: validate_core_diagram(cd, samples))
    elif kind == "crossed-module":
        _merge(report, _selected(doc, "core_diagrams", args.name),
               lambda cd: validate_crossed_module(crossed_module_from_diagram(cd, args.side)))
    elif kind == "morphism":
        _merge(report, _selected(doc, "morphisms", args.name), _validate_morphism)
    return report, None


def _connection(doc: Document, name: str | None, acting, module_rank: int, rng) -> Connection:
    if name is not None:
        conn = doc.get("connections", name)
        if conn.acting != acting or conn.module_rank != module_rank:
            raise InputError(f"connection {name!r} does not act by the right algebroid on the right bundle")
        return conn
    if rng is not None:
        return fixtures.random_connection(rng, acting, module_rank)
    return Connection.zero(acting, module_rank)


def _rng(args):
    return random.Random(args.seed) if args.seed is not None else None


def cmd_build_comma(args, doc: Document):
    if args.diagram is not None or (args.map is None and doc.core_diagrams):
        cd = doc.only("core_diagrams", args.diagram)
        delta, C, A = cd.delA, cd.C, cd.A
    else:
        if args.map is None or args.source is None or args.target is None:
            raise InputError("build-comma needs --map, --source and --target (or a core diagram)")
        delta = doc.get("bundle_maps", args.map)
        C = doc.get("algebroids", args.source)
        A = doc.get("algebroids", args.target)
    nabla = _connection(doc, args.connection, A, C.rank, _rng(args))
    s = build_comma(delta, C, A, nabla)
    out = Document(doc.chart, split_dlas={args.output_name or "comma": s})
    return validate_matched_pair(s), out


def cmd_build_quotient(args, doc: Document):
    cd = doc.only("core_diagrams", args.diagram)
    sigmaB = doc.get("bundle_maps", args.sigma_b) if args.sigma_b else None
    if sigmaB is not None:
        cd = cd.with_choices(sigmaB=sigmaB)
    if args.connection is not None:
        nabla = _connection(doc, args.connection, cd.A, cd.C.rank, None)
    else:
        rng = _rng(args)
        xm = crossed_module_from_diagram(cd, "A")
        nabla = extend_connection(cd, xm, fixtures.random_w(rng, cd) if rng is not None else None)
    q = build_quotient(cd, nabla, cd.sigmaB)
    report = validate_matched_pair(q)
    comma = build_comma(cd.delA, cd.C, cd.A, nabla, check=False)
    report.extend(quotient_projection_check(comma, q, cd), prefix="projection.")
    out = Document(doc.chart, split_dlas={args.output_name or "quotient": q},
                   connections={"nabla": nabla})
    return report, out


def cmd_extract_core(args, doc: Document):
    s = doc.only("split_dlas", args.name)
    cd = extract_core_diagram(s)
    report = validate_core_diagram(cd, _check_samples(args.samples, doc.chart.dim))
    return report, Document(doc.chart, core_diagrams={args.output_name or "core": cd})


def cmd_roundtrip(args, doc: Document):
    s = doc.only("split_dlas", args.name)
    rng = _rng(args)
    nablaW = None
    if rng is not None:
        nablaW = fixtures.random_w(rng, extract_core_diagram(s, check=False))
    rt = roundtrip(s, nablaW, samples=_check_samples(args.samples, doc.chart.dim))
    out = Document(doc.chart, split_dlas={"rebuilt": rt.rebuilt, "original": s})
    if rt.iso.forward is not None:
        out.morphisms["phi_witness"] = DLAMorphismEntry(rt.iso.forward, rt.rebuilt, s)
    return rt.report, out


def cmd_morphism_check(args, doc: Document):
    entry = doc.only("morphisms", args.name)
    if not isinstance(entry, DiagramMorphismEntry):
        return _validate_morphism(entry), None
    src, dst = entry.source, entry.target
    report = Report()
    report.extend(validate_diagram_morphism(entry.morphism, src, dst))
    if not report.ok:
        return report, None

    def nabla_for(cd, name):
        if name is not None:
            return _connection(doc, name, cd.A, cd.C.rank, None)
        return extend_connection(cd, crossed_module_from_diagram(cd, "A"))

    n1 = nabla_for(src, args.source_connection)
    n2 = nabla_for(dst, args.target_connection)
    qm = build_quotient_morphism(entry.morphism, (src, n1, None), (dst, n2, None))
    report.extend(qm.report, prefix="quotient_morphism.")
    s1 = build_quotient(src, n1)
    s2 = build_quotient(dst, n2)
    out = Document(doc.chart, morphisms={"induced": DLAMorphismEntry(qm.morphism, s1, s2)})
    return report, out


COMMANDS = {
    "validate": cmd_validate,
    "build-comma": cmd_build_comma,
    "build-quotient": cmd_build_quotient,
    "extract-core": cmd_extract_core,
    "roundtrip": cmd_roundtrip,
    "morphism-check": cmd_morphism_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=parse_samples, default=None,
                        help="sample points for rank certificates, e.g. '0,0;1,1/2'")
    common.add_argument("--seed", type=int, default=None, help="seed for random connection data")
    common.add_argument("--emit", default=None, help="write constructed objects to this path")
    common.add_argument("--report", choices=("text", "machine"), default="text")

    parser = argparse.ArgumentParser(prog="dlalg", description="Exact checks for double Lie algebroids in split form.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="validate objects in a document")
    p.add_argument("kind", choices=VALIDATE_KINDS)
    p.add_argument("document")
    p.add_argument("--name", default=None, help="entry to validate (default: all)")
    p.add_argument("--side", choices=("A", "B"), default="A", help="crossed module side")

    p = sub.add_parser("build-comma", parents=[common], help="build the comma double Lie algebroid")
    p.add_argument("document")
    p.add_argument("--diagram", default=None, help="use delA: C -> A of this core diagram")
    p.add_argument("--map", default=None)
    p.add_argument("--source", default=None, help="algebroid C")
    p.add_argument("--target", default=None, help="algebroid A")
    p.add_argument("--connection", default=None, help="A-connection on C (default zero, or random with --seed)")
    p.add_argument("--output-name", default=None)

    p = sub.add_parser("build-quotient", parents=[common], help="build the quotient of a transitive core diagram")
    p.add_argument("document")
    p.add_argument("--diagram", default=None)
    p.add_argument("--connection", default=None, help="extended connection (default: W = 0, or random with --seed)")
    p.add_argument("--sigma-b", default=None, help="bundle map to use as right inverse of delB")
    p.add_argument("--output-name", default=None)

    p = sub.add_parser("extract-core", parents=[common], help="core diagram of a split double Lie algebroid")
    p.add_argument("document")
    p.add_argument("--name", default=None)
    p.add_argument("--output-name", default=None)

    p = sub.add_parser("roundtrip", parents=[common], help="core diagram round trip and canonical isomorphism")
    p.add_argument("document")
    p.add_argument("--name", default=None)

    p = sub.add_parser("morphism-check", parents=[common], help="validate a morphism, or the quotient morphism "
                                                                 "induced by a diagram morphism")
    p.add_argument("document")
    p.add_argument("--name", default=None)
    p.add_argument("--source-connection", default=None)
    p.add_argument("--target-connection", default=None)
    return parser


def _print_report(report: Report, mode: str, stream) -> None:
    text = report.to_jsonl() if mode == "machine" else report.to_text()
    if text:
        print(text, file=stream)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        doc = load_document(args.document)
        report, out = COMMANDS[args.command](args, doc)
    except RefusalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        if exc.report is not None:
            _print_report(exc.report, args.report, sys.stdout)
        return 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.emit and out is not None:
        try:
            with open(args.emit, "w", encoding="utf-8") as fh:
                fh.write(serialize_document(out))
        except OSError as exc:
            print(f"error: cannot write {args.emit}: {exc.strerror}", file=sys.stderr)
            return 2
    _print_report(report, args.report, sys.stdout)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
