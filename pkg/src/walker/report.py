"""Check records and the report emitted by the command line tool."""
from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .verdict import Verdict

CHECK = "CHECK"
INFO = "INFO"


@dataclass
class CheckRecord:
    name: str
    verdict: bool | None
    confidence: str
    diagnostics: dict
    anchor: str
    level: str = CHECK

    def as_dict(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "confidence": self.confidence,
                "diagnostics": self.diagnostics, "anchor": self.anchor, "level": self.level}


def jsonable(x):
    """Recursively convert Fractions, numpy scalars and expressions to JSON types."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    return str(x)


@dataclass
class Report:
    kind: str
    command: str
    seed: int
    checks: list[CheckRecord] = field(default_factory=list)
    tensors: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    record_timings: bool = False

    def add(self, name: str, verdict: Verdict, anchor: str, level: str = CHECK, **extra) -> Verdict:
        if any(c.name == name for c in self.checks):
            raise ValueError(f"check {name!r} recorded twice")
        diagnostics = {"detail": verdict.detail} if verdict.detail else {}
        if verdict.witness:
            diagnostics["witness"] = verdict.witness
        if verdict.notes:
            diagnostics["notes"] = list(verdict.notes)
        diagnostics.update(extra)
        self.checks.append(CheckRecord(name, bool(verdict.value), verdict.confidence.value,
                                       jsonable(diagnostics), anchor, level))
        return verdict

    def info(self, name: str, anchor: str, confidence: str = "EXACT", **diagnostics) -> None:
        if any(c.name == name for c in self.checks):
            raise ValueError(f"check {name!r} recorded twice")
        self.checks.append(CheckRecord(name, None, confidence, jsonable(diagnostics), anchor, INFO))

    @contextmanager
    def timed(self, stage: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            if self.record_timings:
                self.timings[stage] = round(time.perf_counter() - start, 6)

    @property
    def passed(self) -> bool:
        return all(c.verdict for c in self.checks if c.level == CHECK)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "command": self.command, "seed": self.seed,
                "checks": [c.as_dict() for c in self.checks],
                "tensors": jsonable(self.tensors), "timings": self.timings}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def render(self) -> str:
        lines = [f"walker {self.command}: {self.kind} (seed {self.seed})", ""]
        if self.checks:
            rows = [("check", "result", "confidence", "detail")]
            for c in self.checks:
                if c.level == INFO:
                    result = "INFO" if c.verdict is None else ("INFO:yes" if c.verdict else "INFO:no")
                else:
                    result = "PASS" if c.verdict else "FAIL"
                rows.append((c.name, result, c.confidence, _summary(c.diagnostics)))
            widths = [max(len(r[i]) for r in rows) for i in range(3)]
            for k, r in enumerate(rows):
                lines.append("  ".join(r[i].ljust(widths[i]) for i in range(3)) + "  " + r[3])
                if k == 0:
                    lines.append("  ".join("-" * w for w in widths) + "  " + "-" * 6)
            lines.append("")
        for key, value in self.tensors.items():
            lines.extend(_render_tensor(key, jsonable(value)))
        if self.timings:
            lines.append("timings (s):")
            lines.extend(f"  {k}: {v}" for k, v in self.timings.items())
        verdict = "all checks passed" if self.passed else "some checks failed"
        lines.append(verdict)
        return "\n".join(lines)


def _summary(diagnostics: dict) -> str:
    if not diagnostics:
        return ""
    parts = []
    for k, v in diagnostics.items():
        if k == "detail":
            parts.insert(0, str(v))
        elif k != "notes":
            parts.append(f"{k}={json.dumps(v)}")
    return "; ".join(parts)


def _render_tensor(key: str, value, indent: str = "") -> list[str]:
    if isinstance(value, dict):
        if not value:
            return [f"{indent}{key}: (none)"]
        out = [f"{indent}{key}:"]
        for k, v in value.items():
            out.extend(_render_tensor(k, v, indent + "  "))
        return out
    if isinstance(value, list) and value and all(isinstance(r, list) for r in value):
        out = [f"{indent}{key}:"]
        out.extend(f"{indent}  [{', '.join(map(str, r))}]" for r in value)
        return out
    if isinstance(value, list) and value and all(isinstance(r, dict) for r in value):
        out = [f"{indent}{key}:"]
        out.extend(f"{indent}  - " + ", ".join(f"{k}={v}" for k, v in r.items()) for r in value)
        return out
    if isinstance(value, list):
        return [f"{indent}{key}: [{', '.join(map(str, value))}]"]
    return [f"{indent}{key}: {value}"]
