"""Experiment reports and their JSON / CSV serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .jacobi_core import JacobiParams

__all__ = ["Check", "ExperimentReport", "format_number", "to_json", "to_csv", "write_report"]


@dataclass
class Check:
    description: str
    measured: float
    threshold: float
    passed: bool
    relation: str = "<="

    def __post_init__(self):
        self.measured = float(self.measured)
        self.threshold = float(self.threshold)
        self.passed = bool(self.passed)
        if not math.isfinite(self.measured):
            raise ValueError(f"measured value for {self.description!r} is not finite")


@dataclass
class ExperimentReport:
    name: str
    params: list = field(default_factory=list)
    settings: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, description: str, measured: float, threshold: float,
              relation: str = "<=", passed: bool | None = None) -> Check:
        """Record a check; ``passed`` defaults to comparing measured against threshold."""
        if passed is None:
            passed = {
                "<=": measured <= threshold,
                "<": measured < threshold,
                ">=": measured >= threshold,
                ">": measured > threshold,
                "==": measured == threshold,
            }[relation]
        item = Check(description, measured, threshold, passed, relation)
        self.checks.append(item)
        return item

    def extend(self, other: "ExperimentReport", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.description, c.measured, c.threshold,
                                     c.passed, c.relation))

    def summary_lines(self):
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            yield (f"[{flag}] {self.name}: {c.description}: measured={format_number(c.measured)}"
                   f" {c.relation} {format_number(c.threshold)}")

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "params": [_params_dict(p) for p in self.params],
            "settings": self.settings,
            "checks": [
                {"description": c.description, "measured": c.measured, "threshold": c.threshold,
                 "relation": c.relation, "pass": c.passed}
                for c in self.checks
            ],
            "notes": self.notes,
            "overall": self.overall,
        }


def _params_dict(p):
    if isinstance(p, JacobiParams):
        return {"alpha": p.alpha, "beta": p.beta}
    return p


def format_number(x) -> str:
    """17 significant digits; infinities as the string sentinel 'inf'."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _emit(obj, indent: int, level: int, out: list):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        out.append({True: "true", False: "false", None: "null"}[obj])
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        text = format_number(obj)
        if not math.isfinite(obj):
            text = f'"{text}"'
        elif not any(ch in text for ch in ".en"):
            text += ".0"
        out.append(text)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f"{pad}{_emit_key(k)}: ")
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    elif hasattr(obj, "item"):
        _emit(obj.item(), indent, level, out)
    else:
        raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit_key(k):
    return json.dumps(str(k))


def to_json(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    if isinstance(obj, ExperimentReport):
        obj = obj.as_dict()
    out: list = []
    _emit(obj, indent, 0, out)
    return "".join(out) + "\n"


CSV_HEADER = ("name", "check", "measured", "threshold", "pass")


def to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in report.checks:
        writer.writerow([report.name, c.description, format_number(c.measured),
                         format_number(c.threshold), "true" if c.passed else "false"])
    return buf.getvalue()


def write_report(report: ExperimentReport, fmt: str, path) -> None:
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    Path(path).write_text(text)
