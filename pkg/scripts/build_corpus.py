"""Regenerate fixtures/*.json and the golden reports in fixtures/expected/.

Run from the repository root: python3 scripts/build_corpus.py
"""
from __future__ import annotations

import contextlib
import io
import json
import pathlib

from dlalg.cli import main
from dlalg.fixtures import GOLDEN_RUNS, corpus_documents
from dlalg.serialize import serialize_document

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def golden_name(corpus: str, args: list[str]) -> str:
    return f"{corpus}__{'_'.join(args)}.jsonl"


def run(argv: list[str]) -> tuple[int, str]:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(io.StringIO()):
        code = main(argv)
    return code, buf.getvalue()


def command_line(corpus: str, args: list[str]) -> list[str]:
    """CLI argv: the command words, then the document path, then the machine report flag."""
    head = args[:2] if args[0] == "validate" else args[:1]
    return head + [str(FIXTURES / f"{corpus}.json")] + args[len(head):] + ["--report", "machine"]


def main_build() -> None:
    FIXTURES.mkdir(exist_ok=True)
    (FIXTURES / "expected").mkdir(exist_ok=True)
    for name, doc in corpus_documents().items():
        (FIXTURES / f"{name}.json").write_text(serialize_document(doc), encoding="utf-8")
    manifest = []
    for corpus, args in GOLDEN_RUNS:
        code, out = run(command_line(corpus, args))
        fname = golden_name(corpus, args)
        (FIXTURES / "expected" / fname).write_text(out, encoding="utf-8")
        manifest.append({"corpus": corpus, "args": args, "exit_code": code, "expected": fname})
    (FIXTURES / "expected" / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main_build()
