"""Structured pass/fail reports with the bounds every check was held to.

Schema v1: a report is JSON with sorted keys; the wall-time field is the
only part excluded from byte-determinism guarantees.
"""

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass
class CheckRecord:
    name: str
    measured: float
    bound: float
    passed: bool
    comparator: str = "<="
    tolerance: float | None = None
    detail: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "name": self.name,
            "measured": self.measured,
            "bound": self.bound,
            "comparator": self.comparator,
            "passed": bool(self.passed),
        }
        if self.tolerance is not None:
            out["tolerance"] = self.tolerance
        if self.detail:
            out["detail"] = self.detail
        return out


def check_upper(name, measured, bound, tolerance=None, detail=None):
    """measured <= bound, recorded with the bound it was compared against."""
    return CheckRecord(name=name, measured=float(measured), bound=float(bound),
                       passed=bool(measured <= bound), comparator="<=",
                       tolerance=tolerance, detail=detail or {})


def check_flag(name, passed, measured=0.0, detail=None):
    return CheckRecord(name=name, measured=float(measured), bound=1.0,
                       passed=bool(passed), comparator="flag",
                       detail=detail or {})


@dataclass
class VerificationReport:
    command: str
    config: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    evidence_only: bool = False
    wall_time_s: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, record):
        self.checks.append(record)
        return record

    def note(self, text):
        self.notes.append(text)

    def to_dict(self, include_wall_time=True):
        out = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
            "evidence_only": bool(self.evidence_only),
            "overall_pass": self.passed,
        }
        if self.extra:
            out["extra"] = self.extra
        if include_wall_time and self.wall_time_s is not None:
            out["wall_time_s"] = self.wall_time_s
        return out

    def to_json(self, include_wall_time=True):
        return json.dumps(self.to_dict(include_wall_time), sort_keys=True, indent=2)

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")

    def summary_lines(self):
        lines = []
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            lines.append(
                f"[{tag}] {c.name}: measured={c.measured:.6g} "
                f"{c.comparator} bound={c.bound:.6g}"
            )
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return lines
