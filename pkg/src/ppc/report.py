"""Deterministic report assembly and rendering.

The machine format is UTF-8 JSON with sorted keys and indent 2; floats use the
shortest round-trip representation, so parsing a report and re-serializing it
reproduces the bytes exactly.  The text format prints the same numbers through
``repr``, keeping the numeric content of both formats identical.
"""

from __future__ import annotations

import json

import numpy as np

from . import __version__
from .jets import ChartPoint

TOOL_NAME = "ppc"


def sanitize(obj):
    """Convert numpy scalars/arrays and chart points into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, ChartPoint):
        return [obj.x, obj.y, obj.z]
    if isinstance(obj, np.ndarray):
        return sanitize(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def check_record(name: str, passed: bool, tolerance=None, worst_residual=None,
                 worst_point=None, **extra) -> dict:
    rec = {"name": name, "passed": bool(passed), "tolerance": tolerance,
           "worst_residual": worst_residual, "worst_point": worst_point}
    rec.update({k: v for k, v in extra.items() if v not in (None, "")})
    return sanitize(rec)


def make_report(command: str, spec_name: str, spec_digest: str,
                checks: list, summary: dict) -> dict:
    return {
        "checks": sanitize(checks),
        "command": command,
        "input": {"digest": spec_digest, "name": spec_name},
        "summary": sanitize(summary),
        "tool": {"name": TOOL_NAME, "version": __version__},
    }


def all_passed(report: dict) -> bool:
    return all(rec["passed"] for rec in report["checks"])


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_fmt(v)}" for k, v in sorted(value.items())) + "}"
    return str(value)


def to_text(report: dict) -> str:
    lines = []
    tool = report["tool"]
    inp = report["input"]
    lines.append(f"{tool['name']} {tool['version']} command={report['command']} "
                 f"input={inp['name']} sha256={inp['digest']}")
    for rec in report["checks"]:
        status = "PASS" if rec["passed"] else "FAIL"
        parts = [f"{status} {rec['name']}"]
        if rec.get("worst_residual") is not None:
            parts.append(f"worst={_fmt(rec['worst_residual'])}")
        if rec.get("tolerance") is not None:
            parts.append(f"tol={_fmt(rec['tolerance'])}")
        if rec.get("worst_point") is not None:
            parts.append(f"at={_fmt(rec['worst_point'])}")
        for key in sorted(rec):
            if key in ("name", "passed", "tolerance", "worst_residual",
                       "worst_point"):
                continue
            parts.append(f"{key}={_fmt(rec[key])}")
        lines.append("  " + "  ".join(parts))
    lines.append("summary:")
    for key in sorted(report["summary"]):
        lines.append(f"  {key} = {_fmt(report['summary'][key])}")
    lines.append("RESULT: " + ("PASS" if all_passed(report) else "FAIL"))
    return "\n".join(lines) + "\n"
