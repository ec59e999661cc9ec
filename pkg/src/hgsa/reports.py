"""Verification reports and their JSON, CSV and text renderings."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

from rich.table import Table

REPORT_FORMATS = ("text", "json", "csv")

CSV_HEADER = ["Scope", "Input", "Expected", "Observed", "Fidelity", "Probability", "Passed"]


def _rounded(value: Optional[float]) -> Optional[float]:
    return None if value is None else round(float(value), 12)


@dataclass
class CaseRecord:
    """One verified case."""

    input: str
    expected: str
    observed: str
    passed: bool
    fidelity: Optional[float] = None
    probability: Optional[float] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "input": self.input,
            "expected": self.expected,
            "observed": self.observed,
            "fidelity": _rounded(self.fidelity),
            "probability": _rounded(self.probability),
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    """Outcome of one verification scope, optionally with nested sections.

    A report passes when every case and every section passes; a report
    without cases passes vacuously.
    """

    scope: str
    cases: list[CaseRecord] = field(default_factory=list)
    sections: list["VerificationReport"] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    duration_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases) and all(s.passed for s in self.sections)

    @property
    def failures(self) -> list[CaseRecord]:
        return [c for c in self.cases if not c.passed]

    def add(self, case: CaseRecord) -> None:
        self.cases.append(case)

    def add_section(self, section: "VerificationReport") -> None:
        self.sections.append(section)

    def note(self, message: str) -> None:
        self.notes.append(message)

    def summary(self) -> str:
        passed = sum(1 for c in self.cases if c.passed)
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.scope}: {verdict} ({passed}/{len(self.cases)} cases)"

    def walk(self) -> Iterable["VerificationReport"]:
        yield self
        for section in self.sections:
            yield from section.walk()

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "scope": self.scope,
            "pass": self.passed,
            "cases": [c.to_dict() for c in self.cases],
            "duration_ms": round(self.duration_ms, 3),
        }
        if self.notes:
            data["notes"] = list(self.notes)
        if self.sections:
            data["sections"] = [s.to_dict() for s in self.sections]
        return data


def to_json(report: VerificationReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def to_csv(report: VerificationReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for section in report.walk():
        for case in section.cases:
            writer.writerow(
                [
                    section.scope,
                    case.input,
                    case.expected,
                    case.observed,
                    "" if case.fidelity is None else f"{case.fidelity:.12f}",
                    "" if case.probability is None else f"{case.probability:.12f}",
                    "yes" if case.passed else "no",
                ]
            )
    return buffer.getvalue()


def to_text(report: VerificationReport) -> str:
    lines = []
    for section in report.walk():
        lines.append(section.summary())
        lines.extend(f"  note: {n}" for n in section.notes)
        for case in section.failures:
            lines.append(
                f"  FAIL {case.input}: expected {case.expected}, observed {case.observed}"
            )
    return "\n".join(lines) + "\n"


def render(report: VerificationReport, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"Unsupported report format: {fmt}")


def write_report(report: VerificationReport, fmt: str, output_path: Path) -> None:
    output_path.write_text(render(report, fmt))


def summary_table(report: VerificationReport) -> Table:
    """One row per section: scope, verdict, passed/total, duration."""
    table = Table(title="Verification")
    table.add_column("Scope", style="cyan")
    table.add_column("Result")
    table.add_column("Cases", justify="right")
    table.add_column("Time (ms)", justify="right")
    for section in report.walk():
        passed = sum(1 for c in section.cases if c.passed)
        verdict = "[green]PASS[/green]" if section.passed else "[red]FAIL[/red]"
        table.add_row(
            section.scope,
            verdict,
            f"{passed}/{len(section.cases)}",
            f"{section.duration_ms:.1f}",
        )
    return table
