"""Built-in example corpus with pinned verdicts."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .dsl import parse
from .runner import Flags, RunReport, run_script


class SelectionError(ValueError):
    pass


@dataclass
class Pin:
    query: int  # 1-based query number in the case script
    path: str  # dotted path into the query result
    expect: object

    def actual(self, result: dict):
        cur = result
        for part in self.path.split("."):
            if isinstance(cur, list):
                cur = cur[int(part)]
            elif isinstance(cur, dict) and part in cur:
                cur = cur[part]
            else:
                return None
        return cur


@dataclass
class Case:
    id: str
    file: str
    citation: str
    pins: list[Pin]
    oracle: bool = False

    def source(self) -> str:
        return resources.files(__package__).joinpath("corpus", self.file).read_text(encoding="utf-8")


def load_manifest() -> list[Case]:
    raw = json.loads(resources.files(__package__).joinpath("corpus", "manifest.json").read_text(encoding="utf-8"))
    return [
        Case(c["id"], c["file"], c["citation"], [Pin(**p) for p in c["pins"]], c.get("oracle", False))
        for c in raw["cases"]
    ]


def select(cases: list[Case], all_: bool, ids: list[str] | None) -> list[Case]:
    if all_:
        return cases
    by_id = {c.id: c for c in cases}
    unknown = [i for i in ids or [] if i not in by_id]
    if unknown or not ids:
        known = ", ".join(sorted(by_id))
        raise SelectionError(f"no corpus case matches {', '.join(unknown) or 'the selection'} (known: {known})")
    return [by_id[i] for i in ids]


@dataclass
class CaseOutcome:
    case: Case
    report: RunReport
    failures: list[str]

    @property
    def matched(self) -> bool:
        return not self.failures and self.report.exit_code == 0

    def to_dict(self) -> dict:
        return {
            "id": self.case.id,
            "citation": self.case.citation,
            "matched": self.matched,
            "pin_failures": self.failures,
            **self.report.to_dict(),
        }


def run_case(case: Case, flags: Flags | None = None) -> CaseOutcome:
    flags = flags or Flags()
    report = run_script(parse(case.source()), flags, case.file)
    failures = []
    for pin in case.pins:
        if pin.query > len(report.results):
            failures.append(f"query {pin.query} missing")
            continue
        got = pin.actual(report.results[pin.query - 1])
        if got != pin.expect:
            failures.append(f"query {pin.query} {pin.path}: expected {pin.expect!r}, got {got!r}")
    return CaseOutcome(case, report, failures)
