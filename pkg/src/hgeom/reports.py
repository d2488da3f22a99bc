"""Audit report containers and deterministic emission.

Reports hold named residual rows (a row passes exactly when its residual is
below its tolerance) plus free-form metadata and optional outcome flags.
JSON output is produced by a small hand-rolled emitter so that numbers are
always printed with 15 significant digits and key order is stable: identical
audits yield byte-identical documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

__all__ = ["CheckRow", "AuditReport", "emit_json", "emit_text"]


@dataclass(frozen=True)
class CheckRow:
    """One named residual with its tolerance; passes iff residual < tol."""

    name: str
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


@dataclass(frozen=True)
class AuditReport:
    """A set of check rows over sampled points, plus conventions and flags."""

    model: str
    seed: int | None
    points: int
    tol: float
    checks: Sequence[CheckRow]
    metadata: Mapping[str, str] = field(default_factory=dict)
    flags: Mapping[str, str] | None = None
    residuals: Mapping[str, float] | None = None
    timestamp: str | None = None

    @property
    def all_passed(self) -> bool:
        return all(row.passed for row in self.checks)

    def to_document(self) -> dict:
        """Stable-key-order plain structure for emission."""
        doc: dict = {
            "model": self.model,
            "seed": self.seed,
            "points": self.points,
            "tol": self.tol,
        }
        doc["checks"] = [
            {
                "name": row.name,
                "max_residual": row.max_residual,
                "tol": row.tol,
                "pass": row.passed,
            }
            for row in self.checks
        ]
        if self.flags is not None:
            doc["flags"] = dict(self.flags)
        if self.residuals is not None:
            doc["residuals"] = dict(self.residuals)
        doc["metadata"] = dict(self.metadata)
        if self.timestamp is not None:
            doc["timestamp"] = self.timestamp
        return doc


def _emit_value(value, indent: int, pieces: list[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            pieces.append("{}")
            return
        pieces.append("{\n")
        items = list(value.items())
        for k, v in items[:-1]:
            pieces.append(f"{pad}  {json.dumps(k)}: ")
            _emit_value(v, indent + 1, pieces)
            pieces.append(",\n")
        k, v = items[-1]
        pieces.append(f"{pad}  {json.dumps(k)}: ")
        _emit_value(v, indent + 1, pieces)
        pieces.append(f"\n{pad}}}")
        return
    if isinstance(value, (list, tuple)):
        if not value:
            pieces.append("[]")
            return
        pieces.append("[\n")
        for v in value[:-1]:
            pieces.append(f"{pad}  ")
            _emit_value(v, indent + 1, pieces)
            pieces.append(",\n")
        pieces.append(f"{pad}  ")
        _emit_value(value[-1], indent + 1, pieces)
        pieces.append(f"\n{pad}]")
        return
    if isinstance(value, bool):
        pieces.append("true" if value else "false")
        return
    if value is None:
        pieces.append("null")
        return
    if isinstance(value, float):
        text = f"{value:.15g}"
        # keep the token a valid JSON number
        if text in ("inf", "-inf", "nan"):
            raise ValueError(f"non-finite residual cannot be serialized: {value!r}")
        pieces.append(text)
        return
    if isinstance(value, int):
        pieces.append(str(value))
        return
    if isinstance(value, str):
        pieces.append(json.dumps(value))
        return
    raise TypeError(f"cannot serialize {value!r}")


def emit_json(report: AuditReport) -> str:
    """Serialize a report deterministically (15 significant digits)."""
    pieces: list[str] = []
    _emit_value(report.to_document(), 0, pieces)
    pieces.append("\n")
    return "".join(pieces)


def emit_text(report: AuditReport) -> str:
    """Human-readable table of the same rows as the JSON document."""
    lines = [
        f"model: {report.model}",
        f"seed: {report.seed if report.seed is not None else '-'}"
        f"  points: {report.points}  tol: {report.tol:.15g}",
    ]
    if report.timestamp is not None:
        lines.append(f"timestamp: {report.timestamp}")
    if report.checks:
        name_width = max(len(row.name) for row in report.checks)
        lines.append("")
        lines.append(f"{'check'.ljust(name_width)}  {'max_residual':>22}  verdict")
        for row in report.checks:
            lines.append(
                f"{row.name.ljust(name_width)}  {row.max_residual:>22.15g}  "
                f"{'PASS' if row.passed else 'FAIL'}"
            )
    if report.flags:
        lines.append("")
        lines.append("flags:")
        width = max(len(k) for k in report.flags)
        for k, v in report.flags.items():
            lines.append(f"  {k.ljust(width)}  {v}")
    if report.residuals:
        lines.append("")
        lines.append("residuals:")
        width = max(len(k) for k in report.residuals)
        for k, v in report.residuals.items():
            lines.append(f"  {k.ljust(width)}  {v:.15g}")
    if report.metadata:
        lines.append("")
        lines.append("metadata:")
        for k, v in report.metadata.items():
            lines.append(f"  {k}: {v}")
    lines.append("")
    return "\n".join(lines)
