"""Check reports shared by every validator."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass(frozen=True)
class Check:
    check_id: str
    status: str
    paper_anchor: str
    counterexample: tuple | None = None
    detail: str | None = None

    def to_dict(self) -> dict:
        out = {
            "check_id": self.check_id,
            "status": self.status,
            "counterexample": list(self.counterexample) if self.counterexample is not None else None,
            "paper_anchor": self.paper_anchor,
        }
        if self.detail is not None:
            out["detail"] = self.detail
        return out

    def to_text(self) -> str:
        line = f"[{self.status.upper():4}] {self.check_id} ({self.paper_anchor})"
        if self.counterexample is not None:
            line += " counterexample=(" + ", ".join(map(str, self.counterexample)) + ")"
        if self.detail:
            line += f" :: {self.detail}"
        return line


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "Report", prefix: str = "") -> "Report":
        for c in other.checks:
            if prefix:
                c = Check(prefix + c.check_id, c.status, c.paper_anchor, c.counterexample, c.detail)
            self.checks.append(c)
        return self

    @property
    def ok(self) -> bool:
        return all(c.status != FAIL for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status == FAIL]

    def get(self, check_id: str) -> Check:
        for c in self.checks:
            if c.check_id == check_id:
                return c
        raise KeyError(check_id)

    def status_of(self, check_id: str) -> str:
        return self.get(check_id).status

    def __iter__(self) -> Iterator[Check]:
        return iter(self.checks)

    def __len__(self) -> int:
        return len(self.checks)

    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_text(self) -> str:
        lines = [c.to_text() for c in self.checks]
        passed = sum(c.status == PASS for c in self.checks)
        failed = sum(c.status == FAIL for c in self.checks)
        lines.append(f"{passed} passed, {failed} failed, {len(self.checks) - passed - failed} skipped")
        return "\n".join(lines)

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(c.to_dict(), sort_keys=True) for c in self.checks)


def run_check(
    check_id: str,
    paper_anchor: str,
    cases: Iterable[tuple[tuple, Callable[[], object]]],
    fmt: Callable[[object], str] | None = None,
) -> Check:
    """Evaluate lazily until the first failing case.

    Each case is ``(labels, thunk)``; the thunk returns a residual that must
    be zero (falsy, or an object whose ``is_zero()`` is true) for the case to
    pass. ``fmt`` renders a failing residual for the detail line.
    """
    n = 0
    for labels, thunk in cases:
        n += 1
        residual = thunk()
        zero = residual.is_zero() if hasattr(residual, "is_zero") else not residual
        if not zero:
            shown = fmt(residual) if fmt is not None else residual
            return Check(check_id, FAIL, paper_anchor, tuple(labels), f"nonzero residual {shown}")
    return Check(check_id, PASS, paper_anchor, None, f"{n} frame tuples")


def skipped(check_id: str, paper_anchor: str, reason: str) -> Check:
    return Check(check_id, SKIPPED, paper_anchor, None, reason)


def verdict(check_id: str, paper_anchor: str, holds: bool, counterexample=None, detail=None) -> Check:
    return Check(check_id, PASS if holds else FAIL, paper_anchor,
                 None if holds else (tuple(counterexample) if counterexample is not None else None), detail)
