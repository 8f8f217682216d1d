"""Check reports shared by the inequality checkers, diagnostics and certifiers."""
from __future__ import annotations

from dataclasses import dataclass, field

from .space import ProductPoint, Vector

PASSED = "passed"
FAILED = "failed"
INCONCLUSIVE = "inconclusive"
NOT_APPLICABLE = "not_applicable"
PREMISE_NOT_MET = "premise_not_met"


def render_vector(v: Vector) -> str:
    if not v.coords:
        return "{}"
    return "{" + ", ".join(f"{i}: {val!r}" for i, val in v.coords) + "}"


def render_pair(p: ProductPoint) -> str:
    return f"({render_vector(p.first)}, {render_vector(p.second)})"


@dataclass(frozen=True)
class Violation:
    """One failed inequality: lhs <= rhs was expected, slack = lhs - rhs."""

    inputs: tuple[str, ...]
    lhs: float
    rhs: float
    slack: float
    note: str = ""

    def to_json(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "note": self.note,
        }


@dataclass(frozen=True)
class CheckReport:
    name: str
    checked: int
    violations: tuple[Violation, ...] = ()
    status: str = PASSED
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASSED

    def to_json(self, max_violations: int = 10) -> dict:
        return {
            "name": self.name,
            "checked": self.checked,
            "status": self.status,
            "passed": self.passed,
            "n_violations": len(self.violations),
            "violations": [v.to_json() for v in self.violations[:max_violations]],
            "detail": self.detail,
        }


def conclude(name: str, checked: int, violations: list[Violation], detail: str = "") -> CheckReport:
    """Report for a sampled checker: passed exactly when no violations."""
    status = PASSED if not violations else FAILED
    return CheckReport(name, checked, tuple(violations), status, detail)
