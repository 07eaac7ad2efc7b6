"""Check records and experiment reports shared by all experiments.

A :class:`Check` stores an estimate, its standard error, a target and a
tolerance together with the comparison ``rule`` that decides ``passed``:

``abs``   |estimate - target| <= tolerance
``le``    estimate <= target + tolerance
``ge``    estimate >= target - tolerance
``lt``    estimate < target - tolerance  (strictly below, beyond noise)
``true``  estimate is a 0/1 flag that must equal 1
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable

from .errors import DomainError

RULES = ("abs", "le", "ge", "lt", "true")
CSV_COLUMNS = ("name", "estimate", "se", "target", "tolerance", "pass")


def _num(x) -> float | None:
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def decide(rule: str, estimate: float, target: float, tolerance: float) -> bool:
    if rule not in RULES:
        raise DomainError(f"unknown rule {rule!r}")
    if estimate is None or not math.isfinite(estimate):
        return False
    if rule == "true":
        return estimate == 1.0
    if target is None or not math.isfinite(target):
        return False
    tol = 0.0 if tolerance is None else tolerance
    if rule == "abs":
        return abs(estimate - target) <= tol
    if rule == "le":
        return estimate <= target + tol
    if rule == "ge":
        return estimate >= target - tol
    return estimate < target - tol


@dataclass
class Check:
    name: str
    estimate: float | None
    se: float | None = None
    target: float | None = None
    tolerance: float | None = None
    rule: str = "abs"
    passed: bool = field(default=False)
    note: str = ""

    def __post_init__(self):
        self.estimate = _num(self.estimate)
        self.se = _num(self.se)
        self.target = _num(self.target)
        self.tolerance = _num(self.tolerance)
        self.passed = decide(self.rule, self.estimate, self.target, self.tolerance)

    @classmethod
    def flag(cls, name: str, ok: bool, note: str = "") -> "Check":
        return cls(name, 1.0 if ok else 0.0, target=1.0, tolerance=0.0, rule="true", note=note)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Check":
        d = dict(d)
        d.pop("pass", None)
        return cls(**d)


@dataclass
class ExperimentReport:
    experiment: str
    config: dict[str, Any] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    tables: dict[str, list[dict[str, Any]]] = field(default_factory=dict)
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, *checks: Check) -> None:
        self.checks.extend(checks)

    def to_dict(self) -> dict[str, Any]:
        return {"experiment": self.experiment, "config": self.config, "meta": self.meta,
                "checks": [c.to_dict() for c in self.checks], "tables": self.tables,
                "pass": self.passed}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ExperimentReport":
        return cls(d["experiment"], d.get("config", {}), [Check.from_dict(c) for c in d.get("checks", [])],
                   d.get("tables", {}), d.get("meta", {}))

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_csv(self) -> str:
        return checks_to_csv(self.checks)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def checks_to_csv(checks: Iterable[Check]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in checks:
        w.writerow([c.name] + ["" if v is None else repr(v) for v in (c.estimate, c.se, c.target, c.tolerance)]
                   + [str(c.passed).lower()])
    return buf.getvalue()


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    """Long-format CSV for sweep tables; column order follows the first row."""
    buf = io.StringIO()
    if not rows:
        return ""
    cols = list(rows[0])
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else r.get(k)) for k in cols})
    return buf.getvalue()


def serialize(checks_or_report, fmt: str) -> str:
    """``report`` operation: JSON array of checks or long CSV."""
    if isinstance(checks_or_report, ExperimentReport):
        checks = checks_or_report.checks
    else:
        checks = list(checks_or_report)
    if fmt == "json":
        return dumps([c.to_dict() for c in checks])
    if fmt == "csv":
        return checks_to_csv(checks)
    raise DomainError(f"unknown format {fmt!r}; use json or csv")
