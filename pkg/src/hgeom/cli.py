"""Command-line surface: manifest loading, audit orchestration, report emission.

Three subcommands:

* ``audit``     — structure and curvature identity suites on sampled points;
* ``classify``  — class flags (broad/parallel membership, Einstein-type,
  flatness) with their residuals;
* ``conformal`` — transformation-law audits plus the gauge-equation audit
  for a supplied gauge.

Exit status is 0 when every check row passes, 1 when any row fails, and 2 on
usage, manifest or evaluation errors.  Classification flags are reported
outcomes, not checks: a model honestly failing a membership flag still exits
0.  With ``--no-timestamp``, identical invocations produce byte-identical
JSON documents.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .classification import classify_point_set
from .conformal import BUILTIN_GAUGES, invariance_audit, kahler_gauge_audit, make_gauge
from .curvature import (
    christoffel,
    connection_residuals,
    curvature_bundle,
    curvature_identity_residuals,
    structural_identity_residuals,
    structural_tensors,
)
from .fields import FieldExpr, ParseError, parse_scalar_field
from .manifolds import (
    BUILTIN_MODEL_IDS,
    DomainViolation,
    ManifoldSpec,
    builtin_model,
    evaluate_point,
    parse_constraint,
    sample_domain,
)
from .reports import AuditReport, CheckRow, emit_json, emit_text
from .structure import (
    associated_forms,
    classify_bilinear_form,
    compatibility_residuals,
    quaternionic_residuals,
)
from .tensors import DegenerateMetricError

__all__ = ["ManifestError", "load_manifest", "run_audit", "main", "CONVENTIONS"]

CONVENTIONS: Mapping[str, str] = {
    "residual_convention": "sup|A-B| / max(1, sup|A|, sup|B|)",
    "structure_orientation": "(J x)^i = J^i_j x^j; reciprocal component pairs validated by the quaternionic audit",
    "sectional_slot_order": "k = R(x,y,y,x) / (g(x,x) g(y,y) - g(x,y)^2)",
    "star_scalar_trace": "tau* = g^{il} g^{jk} R(e_i, e_j, e_k, J e_l) (double metric trace)",
    "s_tensor_signs": "S = Hess(u) - du x du + (1/2)|grad u|^2 g (the pairing under which the curvature law closes)",
}


class ManifestError(ValueError):
    """A manifest file failed validation; message carries the field path."""


# -- manifest loading ----------------------------------------------------------


def _require(table: Mapping, key: str, kind, path: str):
    if key not in table:
        raise ManifestError(f"{path}{key}: required field missing")
    value = table[key]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ManifestError(f"{path}{key}: expected an integer, got {value!r}")
    if kind is str and not isinstance(value, str):
        raise ManifestError(f"{path}{key}: expected a string, got {value!r}")
    if kind is dict and not isinstance(value, dict):
        raise ManifestError(f"{path}{key}: expected a table")
    if kind is list and not isinstance(value, list):
        raise ManifestError(f"{path}{key}: expected an array")
    return value


def _parse_expr(text, dim: int, path: str) -> FieldExpr:
    if not isinstance(text, str):
        raise ManifestError(f"{path}: expected an expression string, got {text!r}")
    try:
        return parse_scalar_field(text, dim)
    except ParseError as err:
        raise ManifestError(f"{path}: {err}") from err


def _metric_index(key: str, dim: int, path: str) -> tuple[int, int]:
    parts = key.split(",")
    if len(parts) != 2:
        raise ManifestError(f'{path}."{key}": key must look like "i,j"')
    try:
        i, j = (int(part.strip()) for part in parts)
    except ValueError as err:
        raise ManifestError(f'{path}."{key}": key must hold two integers') from err
    for idx in (i, j):
        if not 1 <= idx <= dim:
            raise ManifestError(
                f'{path}."{key}": index {idx} out of range for dimension {dim}'
            )
    return i - 1, j - 1


def load_manifest(path) -> ManifoldSpec:
    """Load and validate a TOML chart manifest into a ManifoldSpec.

    Schema (indices are 1-based in manifests)::

        name = "sphere"
        n = 1
        domain = ["sinh(u1)", "cos(u3)"]        # optional; "expr" / "expr != 0" / "expr > 0"

        [metric]                                 # upper triangle; omitted entries are 0
        "1,1" = "-1"

        [[J1]]                                   # sparse structure entries (J^i_j)
        i = 1
        j = 2
        expr = "-sinh(u1)"

        [box]                                    # sampling interval per coordinate
        u1 = [0.2, 1.5]

        [metadata]                               # optional free-form strings
        kind = "pseudo-sphere"
    """
    file_path = Path(path)
    try:
        blob = file_path.read_bytes()
    except OSError as err:
        raise ManifestError(f"cannot read manifest {file_path}: {err}") from err
    try:
        data = tomllib.loads(blob.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as err:
        raise ManifestError(f"manifest {file_path} is not valid TOML: {err}") from err

    name = _require(data, "name", str, "")
    n = _require(data, "n", int, "")
    if n < 1:
        raise ManifestError(f"n: must be a positive integer, got {n}")
    dim = 4 * n

    metric_table = _require(data, "metric", dict, "")
    metric_rows: list[list[FieldExpr | None]] = [[None] * dim for _ in range(dim)]
    seen: dict[tuple[int, int], str] = {}
    for key, text in metric_table.items():
        i, j = _metric_index(key, dim, "metric")
        lo, hi = (i, j) if i <= j else (j, i)
        if (lo, hi) in seen:
            raise ManifestError(
                f'metric."{key}": duplicate of entry "{seen[(lo, hi)]}"'
            )
        seen[(lo, hi)] = key
        expr = _parse_expr(text, dim, f'metric."{key}"')
        metric_rows[lo][hi] = metric_rows[hi][lo] = expr

    structures = []
    for a in (1, 2, 3):
        key = f"J{a}"
        entries = _require(data, key, list, "")
        rows: list[list[FieldExpr | None]] = [[None] * dim for _ in range(dim)]
        for idx, entry in enumerate(entries):
            where = f"{key}[{idx}]"
            if not isinstance(entry, dict):
                raise ManifestError(f"{where}: expected a table with i, j, expr")
            i = _require(entry, "i", int, f"{where}.")
            j = _require(entry, "j", int, f"{where}.")
            for value in (i, j):
                if not 1 <= value <= dim:
                    raise ManifestError(
                        f"{where}: index {value} out of range for dimension {dim}"
                    )
            text = _require(entry, "expr", str, f"{where}.")
            if rows[i - 1][j - 1] is not None:
                raise ManifestError(f"{where}: duplicate entry for ({i},{j})")
            rows[i - 1][j - 1] = _parse_expr(text, dim, f"{where}.expr")
        structures.append(tuple(tuple(row) for row in rows))

    constraints = []
    for idx, text in enumerate(data.get("domain", [])):
        where = f"domain[{idx}]"
        if not isinstance(text, str):
            raise ManifestError(f"{where}: expected a constraint string")
        try:
            constraints.append(parse_constraint(text, dim))
        except ParseError as err:
            raise ManifestError(f"{where}: {err}") from err

    box_table = _require(data, "box", dict, "")
    box = []
    for k in range(dim):
        key = f"u{k + 1}"
        if key not in box_table:
            raise ManifestError(f"box.{key}: sampling interval missing")
        interval = box_table[key]
        if (
            not isinstance(interval, list)
            or len(interval) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in interval)
        ):
            raise ManifestError(f"box.{key}: expected [lo, hi]")
        lo, hi = float(interval[0]), float(interval[1])
        if not lo < hi:
            raise ManifestError(f"box.{key}: lo must be strictly below hi")
        box.append((lo, hi))

    metadata = {}
    for key, value in data.get("metadata", {}).items():
        if not isinstance(value, str):
            raise ManifestError(f"metadata.{key}: expected a string")
        metadata[key] = value

    try:
        return ManifoldSpec(
            name=name,
            n=n,
            metric=tuple(tuple(row) for row in metric_rows),
            structures=tuple(structures),
            constraints=tuple(constraints),
            box=tuple(box),
            metadata=metadata,
        )
    except ValueError as err:
        raise ManifestError(str(err)) from err


# -- subcommands ---------------------------------------------------------------


def _resolve_model(model: str) -> ManifoldSpec:
    if model in BUILTIN_MODEL_IDS:
        return builtin_model(model)
    return load_manifest(model)


def _audit_report(spec: ManifoldSpec, points, tol: float, seed: int) -> AuditReport:
    """Structure + curvature identity suites, sup-aggregated over the points."""
    worst: dict[str, float] = {}
    labels: dict[str, str] = {}

    def fold(rows: Mapping[str, float]) -> None:
        for key, value in rows.items():
            worst[key] = max(worst.get(key, 0.0), value)

    for x in points:
        p = evaluate_point(spec, x)
        fold({f"quaternionic: {k}": v for k, v in quaternionic_residuals(p).items()})
        compat, forms = compatibility_residuals(p)
        fold({f"compatibility: {k}": v for k, v in compat.items()})
        c = christoffel(p)
        fold({f"connection: {k}": v for k, v in connection_residuals(p, c).items()})
        s = structural_tensors(p, c)
        fold({f"structural: {k}": v for k, v in structural_identity_residuals(p, s).items()})
        b = curvature_bundle(p, c)
        fold({f"curvature: {k}": v for k, v in curvature_identity_residuals(p, b).items()})

        classed = {
            "class(g)": classify_bilinear_form(p.g, p, tol).label,
            "class(Phi)": classify_bilinear_form(forms.Phi, p, tol).label,
            "class(g2)": classify_bilinear_form(forms.g2, p, tol).label,
            "class(g3)": classify_bilinear_form(forms.g3, p, tol).label,
        }
        for key, label in classed.items():
            if key not in labels:
                labels[key] = label
            elif labels[key] != label:
                labels[key] = "mixed"

    checks = [CheckRow(name, value, tol) for name, value in worst.items()]
    return AuditReport(
        model=spec.name,
        seed=seed,
        points=len(points),
        tol=tol,
        checks=checks,
        metadata=dict(CONVENTIONS),
        flags=labels,
    )


def _classify_report(spec: ManifoldSpec, points, tol: float, seed: int) -> AuditReport:
    verdict = classify_point_set(spec, points, tol)
    metadata = dict(CONVENTIONS)
    metadata["fd_tol"] = f"{verdict.fd_tol:.15g}"
    metadata["note"] = "flags are reported outcomes, not checks; they do not affect exit status"
    return AuditReport(
        model=spec.name,
        seed=seed,
        points=len(points),
        tol=tol,
        checks=[],
        metadata=metadata,
        flags=dict(verdict.flags),
        residuals=dict(verdict.residuals),
    )


def _conformal_report(
    spec: ManifoldSpec, gauge_text: str, points, tol: float, seed: int
) -> AuditReport:
    gauge = make_gauge(gauge_text, spec.dim)
    inv = invariance_audit(spec, gauge.u, points, tol)
    kga = kahler_gauge_audit(spec, gauge.u, points, tol)
    checks = [CheckRow(f"invariance: {row.name}", row.max_residual, row.tol) for row in inv.checks]
    checks += [CheckRow(f"gauge audit: {row.name}", row.max_residual, row.tol) for row in kga.checks]
    metadata = dict(CONVENTIONS)
    metadata["gauge"] = gauge.text
    metadata["transformed_model"] = kga.metadata["transformed_model"]
    metadata["F2bar_sup_norm"] = kga.metadata["F2bar_sup_norm"]
    metadata["S_trace"] = kga.metadata["S_trace"]
    metadata["S_vs_half_g_residual"] = kga.metadata["S_vs_half_g_residual"]
    metadata["note"] = "flags describe the transformed model; they are outcomes, not checks"
    return AuditReport(
        model=spec.name,
        seed=seed,
        points=len(points),
        tol=tol,
        checks=checks,
        metadata=metadata,
        flags=dict(kga.flags or {}),
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hgeom",
        description="Numerical audits of quaternion-structured pseudo-Hermitian charts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--model",
            required=True,
            help=f"built-in id ({', '.join(BUILTIN_MODEL_IDS)}) or a manifest path",
        )
        p.add_argument("--points", type=int, default=200, help="number of sampled points")
        p.add_argument("--seed", type=int, default=1, help="sampling seed")
        p.add_argument("--tol", type=float, default=1e-8, help="residual tolerance")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument(
            "--no-timestamp",
            action="store_true",
            help="omit the timestamp field (byte-identical reruns)",
        )

    add_common(sub.add_parser("audit", help="structure + curvature identity suites"))
    add_common(sub.add_parser("classify", help="class membership flags and residuals"))
    conformal = sub.add_parser("conformal", help="conformal transformation audits")
    add_common(conformal)
    conformal.add_argument(
        "--gauge",
        required=True,
        help=f"built-in gauge id ({', '.join(BUILTIN_GAUGES)}) or expr:TEXT",
    )
    return parser


def run_audit(argv: Sequence[str] | None = None) -> int:
    """Entry point: parse arguments, run the audit, emit the report.

    Returns 0 when all checks pass, 1 when any check fails, 2 on usage or
    load errors.
    """
    parser = _build_parser()
    args = parser.parse_args(argv)

    try:
        spec = _resolve_model(args.model)
        if args.points < 1:
            raise ValueError("--points must be a positive integer")
        points = sample_domain(spec, args.points, args.seed)
        if args.command == "audit":
            report = _audit_report(spec, points, args.tol, args.seed)
        elif args.command == "classify":
            report = _classify_report(spec, points, args.tol, args.seed)
        else:
            gauge_text = args.gauge
            if gauge_text.startswith("expr:"):
                gauge_text = gauge_text[len("expr:") :]
            elif gauge_text not in BUILTIN_GAUGES:
                raise ValueError(
                    f"unknown gauge {args.gauge!r}: expected one of "
                    f"{tuple(BUILTIN_GAUGES)} or expr:TEXT"
                )
            report = _conformal_report(spec, gauge_text, points, args.tol, args.seed)
    except (
        ManifestError,
        ParseError,
        DomainViolation,
        DegenerateMetricError,
        ValueError,
        RuntimeError,
    ) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2

    if not args.no_timestamp:
        report = AuditReport(
            model=report.model,
            seed=report.seed,
            points=report.points,
            tol=report.tol,
            checks=report.checks,
            metadata=report.metadata,
            flags=report.flags,
            residuals=report.residuals,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )

    if args.format == "json":
        sys.stdout.write(emit_json(report))
    else:
        sys.stdout.write(emit_text(report))
    return 0 if report.all_passed else 1


def main() -> None:
    sys.exit(run_audit())


if __name__ == "__main__":
    main()
