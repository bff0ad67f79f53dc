"""Versioned JSON verification reports with deterministic formatting."""

from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from typing import Any, Optional

SCHEMA_VERSION = 1
STATUSES = ("pass", "fail", "floor-limited", "inconclusive", "expected-failure")


def format_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    if v == 0:
        return "0.0"
    text = format(v, ".17g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and insertion-ordered keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def timestamp_string(value: Optional[str] = None) -> str:
    """ISO-8601 UTC timestamp; numeric ``value`` is read as epoch seconds."""
    if value is None:
        moment = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0)
        return moment.isoformat()
    try:
        secs = float(value)
    except ValueError:
        return str(value)
    return _dt.datetime.fromtimestamp(secs, _dt.timezone.utc).isoformat()


@dataclass
class CaseRecord:
    identity: str
    params: dict
    function: str
    grid: dict
    max_residual: float
    tolerance: float
    status: str
    exact: bool = False
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    def to_obj(self) -> dict:
        out = {
            "identity": self.identity,
            "params": self.params,
            "function": self.function,
            "grid": self.grid,
            "exact": self.exact,
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "status": self.status,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


def grid_summary(grid) -> dict:
    g = [float(x) for x in grid]
    return {"count": len(g), "min": min(g), "max": max(g)} if g else {"count": 0}


@dataclass
class VerificationReport:
    suite: str
    cases: list
    timestamp: str
    settings: dict

    @property
    def counts(self) -> dict:
        out = {s: 0 for s in STATUSES}
        for c in self.cases:
            out[c.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.cases)

    def to_obj(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "suite": self.suite,
            "timestamp": self.timestamp,
            "settings": self.settings,
            "summary": {"total": len(self.cases), **self.counts},
            "cases": [c.to_obj() for c in self.cases],
        }

    def to_json(self) -> str:
        return dumps(self.to_obj()) + "\n"
