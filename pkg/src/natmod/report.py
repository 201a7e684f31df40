"""Validation reports shared by every checker.

A report is an ordered list of violations.  Each violation carries an
obligation id (a dotted name such as ``cwf.pair_comp``), a short message and a
JSON-friendly witness dictionary.  An empty report means every obligation held.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator


@dataclass(frozen=True)
class Violation:
    obligation: str
    message: str
    witness: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"obligation": self.obligation, "message": self.message, "witness": _jsonable(self.witness)}

    def __str__(self) -> str:
        return f"[{self.obligation}] {self.message}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def add(self, obligation: str, message: str, **witness: Any) -> None:
        self.violations.append(Violation(obligation, message, witness))

    def extend(self, other: "ValidationReport | Iterable[Violation]") -> None:
        self.violations.extend(other)

    @property
    def ok(self) -> bool:
        return not self.violations

    def obligations(self) -> list[str]:
        return [v.obligation for v in self.violations]

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __bool__(self) -> bool:
        # Truthy when something is wrong, mirroring "non-empty report".
        return bool(self.violations)

    def to_json(self) -> list[dict[str, Any]]:
        return [v.to_json() for v in self.violations]

    def __str__(self) -> str:
        if not self.violations:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


class CheckFailed(Exception):
    """Raised when a construction needs data that a failed check could not supply."""

    def __init__(self, report: ValidationReport | str):
        if isinstance(report, str):
            rep = ValidationReport()
            rep.add("error", report)
            report = rep
        self.report = report
        super().__init__(str(report))


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return value.item()
    return value
