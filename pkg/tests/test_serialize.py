from __future__ import annotations

import json
import pathlib
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlalg import fixtures as F
from dlalg.algebroid import Connection
from dlalg.comma import build_comma
from dlalg.errors import InputError
from dlalg.serialize import Document, canonicalize, load_document, parse_document, serialize_document, single

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
DOCS = F.corpus_documents()


@pytest.mark.parametrize("name", sorted(DOCS))
def test_corpus_files_are_current(name):
    assert (FIXTURES / f"{name}.json").read_text(encoding="utf-8") == serialize_document(DOCS[name])


@pytest.mark.parametrize("name", sorted(DOCS))
def test_parse_serialize_roundtrip(name):
    text = serialize_document(DOCS[name])
    assert serialize_document(parse_document(text)) == text
    assert canonicalize(text) == text


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(F.COMMA_FIXTURES), st.integers(0, 10**6))
def test_random_split_data_roundtrip(name, seed):
    delta, C, A = F.comma_input(name)
    s = build_comma(delta, C, A, F.random_connection(random.Random(seed), A, C.rank, degree=2))
    doc = Document(C.chart, split_dlas={"s": s})
    back = parse_document(serialize_document(doc))
    t = back.get("split_dlas", "s")
    assert t.trepA.conn0 == s.trepA.conn0 and t.trepB.curv == s.trepB.curv


def test_canonicalize_ignores_key_order_and_whitespace():
    text = serialize_document(DOCS["ab2"])
    scrambled = json.dumps(json.loads(text), separators=(",", ":"), sort_keys=False)
    assert canonicalize(scrambled) == text


def _doc(name):
    return json.loads(serialize_document(DOCS[name]))


def test_syntax_error_position():
    with pytest.raises(InputError, match=r"line 1, column \d+"):
        parse_document("{\"chart\": ")


def test_unresolved_reference_has_path():
    d = _doc("ab2")
    d["core_diagrams"]["ab2"]["delA"] = "missing"
    with pytest.raises(InputError, match="core_diagrams.ab2.*missing"):
        parse_document(json.dumps(d))


def test_bad_rational_is_reported():
    d = _doc("ab2")
    key = next(iter(d["bundle_maps"]))
    d["bundle_maps"][key]["matrix"][0][0][0]["coeff"] = "1/0"
    with pytest.raises(InputError, match=key):
        parse_document(json.dumps(d))


def test_unknown_version_and_section():
    d = _doc("ab2")
    d["format_version"] = 99
    with pytest.raises(InputError, match="format_version"):
        parse_document(json.dumps(d))
    with pytest.raises(InputError):
        single(F.POINT, widgets={})
    with pytest.raises(InputError):
        parse_document("[1, 2]")


def test_missing_file():
    with pytest.raises(InputError, match="cannot read"):
        load_document("/nonexistent/doc.json")


def test_lookup_errors():
    doc = DOCS["pair-aff"]
    with pytest.raises(InputError, match="no entry"):
        doc.get("split_dlas", "nope")
    assert doc.only("split_dlas", None) is doc.get("split_dlas", "quotient")


def test_chart_mismatch_is_rejected():
    delta, C, A = F.comma_input("tline")
    s = build_comma(delta, C, A, Connection.zero(A, 1))
    with pytest.raises(InputError, match="chart"):
        serialize_document(Document(F.POINT, split_dlas={"s": s}))
