"""Report serialization shared by the CLI: canonical JSON plus aligned tables."""
from __future__ import annotations

import json
import math
from typing import Sequence

JOB_SCHEMA = "growthtight/job-v1"
REPORT_SCHEMA = "growthtight/report-v1"
TOOL_NAME = "growthtight"


def _sanitize(obj):
    """Make a structure strict-JSON-safe: infinities become strings."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        if math.isnan(obj):
            return "nan"
    return obj


def canonical_json(obj) -> str:
    """Deterministic strict JSON: sorted keys, fixed indentation, newline-terminated."""
    return json.dumps(_sanitize(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def format_table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    """Aligned-column plain-text table."""
    cells = [[str(h) for h in headers]] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = []
    for idx, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def build_report(version: str, job: dict, results: dict) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "tool": {"name": TOOL_NAME, "version": version},
        "job": job,
        "results": results,
    }