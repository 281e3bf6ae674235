"""JSON reports."""
from __future__ import annotations

import json
from importlib import resources

from .space import PointSet

SCHEMA_VERSION = "cylalg-report/1"

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_TRUNCATED = 0, 1, 2, 3
STATUS = {EXIT_PASS: "pass", EXIT_FAIL: "fail", EXIT_USAGE: "error", EXIT_TRUNCATED: "truncated"}


def load_schema() -> dict:
    return json.loads(resources.files("cylalg").joinpath("schemas/report.schema.json").read_text())


def encode(obj):
    """Make results JSON friendly: point sets become sorted lists of cells."""
    if isinstance(obj, PointSet):
        return [list(c) for c in obj]
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(encode(v) for v in obj)
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def make_report(command: str, config: dict, result: dict, code: int, elapsed_ms: int | None = None) -> dict:
    out = {
        "schema": SCHEMA_VERSION,
        "command": command,
        "config": encode(config),
        "status": STATUS[code],
        "exit_code": code,
        "result": encode(result),
    }
    if elapsed_ms is not None:
        out["timings"] = {"elapsed_ms": elapsed_ms}
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
