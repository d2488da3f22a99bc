"""Coordinate-chart manifold models.

A :class:`ManifoldSpec` is one chart of dimension ``4n``: a symmetric array
of metric component fields ``g_ij``, three arrays of structure component
fields ``(J_a)^i_j``, domain constraints with margins, and a bounded
sampling box.  :func:`evaluate_point` turns a spec plus coordinates into all
raw pointwise data — ``g``, its first and second coordinate derivatives, the
inverse metric, the three structure matrices and their first derivatives —
with every derivative supplied exactly by the jet kernel.

Index conventions used throughout the package:

* ``(J x)^i = J^i_j x^j``; structure arrays are stored as ``J[i, j] = J^i_j``.
* ``dg[k, i, j] = d_k g_ij`` and ``d2g[k, l, i, j] = d_k d_l g_ij``.
* ``dJ[a, k, i, j] = d_k (J_a)^i_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .fields import (
    FieldExpr,
    evaluate_scalar_field,
    evaluate_scalar_value,
    parse_scalar_field,
)
from .jets import seed_coordinates
from .tensors import MetricPair, invert_metric

__all__ = [
    "DomainConstraint",
    "DomainViolation",
    "ManifoldSpec",
    "PointEval",
    "evaluate_point",
    "sample_domain",
    "builtin_model",
    "BUILTIN_MODEL_IDS",
]

SAMPLING_MARGIN = 1e-3
EVALUATION_MARGIN = 1e-6
SAMPLING_ATTEMPT_CAP = 10000


class DomainViolation(ValueError):
    """Coordinates violate a chart domain constraint (within margin)."""

    def __init__(self, constraint: str, value: float, margin: float):
        self.constraint = constraint
        self.value = value
        self.margin = margin
        super().__init__(
            f"domain constraint {constraint!r} violated: value {value!r} "
            f"within margin {margin!r}"
        )


@dataclass(frozen=True)
class DomainConstraint:
    """One strict-inequality constraint on chart coordinates.

    ``kind`` is ``'nonzero'`` (|expr| must stay >= margin) or ``'positive'``
    (expr must stay >= margin).
    """

    text: str
    expr: FieldExpr
    kind: str = "nonzero"

    def satisfied(self, coords: Sequence[float], margin: float) -> bool:
        value = evaluate_scalar_value(self.expr, coords)
        if self.kind == "positive":
            return value >= margin
        return abs(value) >= margin

    def check(self, coords: Sequence[float], margin: float) -> None:
        value = evaluate_scalar_value(self.expr, coords)
        ok = value >= margin if self.kind == "positive" else abs(value) >= margin
        if not ok:
            raise DomainViolation(self.text, value, margin)


def parse_constraint(text: str, dim: int) -> DomainConstraint:
    """Parse constraint text: ``EXPR`` / ``EXPR != 0`` (nonzero) or ``EXPR > 0`` (positive).

    Comparisons against nonzero constants are folded into the expression,
    e.g. ``u1 > 10`` becomes ``u1 - (10)`` with positive semantics.
    """
    raw = text.strip()
    if "!=" in raw:
        lhs, rhs = raw.split("!=", 1)
        expr = _comparison_expr(lhs, rhs, dim)
        return DomainConstraint(text=raw, expr=expr, kind="nonzero")
    if ">" in raw:
        lhs, rhs = raw.split(">", 1)
        expr = _comparison_expr(lhs, rhs, dim)
        return DomainConstraint(text=raw, expr=expr, kind="positive")
    return DomainConstraint(text=raw, expr=parse_scalar_field(raw, dim), kind="nonzero")


def _comparison_expr(lhs: str, rhs: str, dim: int) -> FieldExpr:
    rhs = rhs.strip()
    if rhs in ("0", "0.0"):
        return parse_scalar_field(lhs, dim)
    return parse_scalar_field(f"({lhs}) - ({rhs})", dim)


@dataclass(frozen=True)
class ManifoldSpec:
    """One chart: metric fields, three structure fields, domain, sampling box."""

    name: str
    n: int
    metric: tuple[tuple[FieldExpr | None, ...], ...]
    structures: tuple[tuple[tuple[FieldExpr | None, ...], ...], ...]
    constraints: tuple[DomainConstraint, ...]
    box: tuple[tuple[float, float], ...]
    metadata: Mapping[str, str] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return 4 * self.n

    def __post_init__(self):
        d = self.dim
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if len(self.metric) != d or any(len(row) != d for row in self.metric):
            raise ValueError(f"metric must be a {d}x{d} array of fields")
        if len(self.structures) != 3:
            raise ValueError("exactly three structure arrays are required")
        for j in self.structures:
            if len(j) != d or any(len(row) != d for row in j):
                raise ValueError(f"each structure must be a {d}x{d} array of fields")
        if len(self.box) != d:
            raise ValueError(f"sampling box must give one interval per coordinate ({d})")
        for k, (lo, hi) in enumerate(self.box):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValueError(f"invalid sampling interval for u{k + 1}: ({lo}, {hi})")


@dataclass(frozen=True)
class PointEval:
    """All raw pointwise data for one chart point."""

    coords: np.ndarray  # (d,)
    g: np.ndarray  # (d, d)
    dg: np.ndarray  # (d, d, d): dg[k, i, j] = d_k g_ij
    d2g: np.ndarray  # (d, d, d, d): d2g[k, l, i, j] = d_k d_l g_ij
    metric: MetricPair
    J: np.ndarray  # (3, d, d): J[a, i, j] = (J_a)^i_j
    dJ: np.ndarray  # (3, d, d, d): dJ[a, k, i, j] = d_k (J_a)^i_j
    n: int

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    @property
    def ginv(self) -> np.ndarray:
        return self.metric.ginv


def evaluate_point(
    spec: ManifoldSpec,
    coords: Sequence[float],
    margin: float = EVALUATION_MARGIN,
) -> PointEval:
    """Evaluate every component field (as a jet) at one chart point."""
    x = np.asarray([float(c) for c in coords], dtype=float)
    d = spec.dim
    if x.shape != (d,):
        raise ValueError(f"expected {d} coordinates, got shape {x.shape}")
    for c in spec.constraints:
        c.check(x, margin)

    jets = seed_coordinates(x)
    g = np.zeros((d, d))
    dg = np.zeros((d, d, d))
    d2g = np.zeros((d, d, d, d))
    for i in range(d):
        for j in range(i, d):
            expr = spec.metric[i][j]
            if expr is None:
                continue
            jet = evaluate_scalar_field(expr, jets)
            g[i, j] = g[j, i] = jet.value
            dg[:, i, j] = dg[:, j, i] = jet.grad
            d2g[:, :, i, j] = d2g[:, :, j, i] = jet.hess

    J = np.zeros((3, d, d))
    dJ = np.zeros((3, d, d, d))
    for a in range(3):
        for i in range(d):
            for j in range(d):
                expr = spec.structures[a][i][j]
                if expr is None:
                    continue
                jet = evaluate_scalar_field(expr, jets)
                J[a, i, j] = jet.value
                dJ[a, :, i, j] = jet.grad

    pair = invert_metric(g)
    return PointEval(coords=x, g=g, dg=dg, d2g=d2g, metric=pair, J=J, dJ=dJ, n=spec.n)


def sample_domain(
    spec: ManifoldSpec,
    count: int,
    seed: int,
    margin: float = SAMPLING_MARGIN,
) -> np.ndarray:
    """Sample ``count`` in-domain points, deterministically for a given seed.

    Point ``i`` is drawn from its own seeded substream, so the first ``k``
    points of a sample are independent of ``count``.  Rejection sampling is
    capped per point; a cap hit means the constrained domain is too thin for
    the declared box.
    """
    if count < 1:
        raise ValueError("count must be a positive integer")
    lo = np.array([interval[0] for interval in spec.box])
    hi = np.array([interval[1] for interval in spec.box])
    points = np.empty((count, spec.dim))
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        for _ in range(SAMPLING_ATTEMPT_CAP):
            x = lo + rng.random(spec.dim) * (hi - lo)
            if all(c.satisfied(x, margin) for c in spec.constraints):
                points[i] = x
                break
        else:
            raise RuntimeError(
                f"sampling cap ({SAMPLING_ATTEMPT_CAP} attempts) exceeded for "
                f"model {spec.name!r}: constrained domain too thin for its box"
            )
    return points


# -- built-in models ---------------------------------------------------------

BUILTIN_MODEL_IDS = ("flat4", "flat8", "sphere")

TWO_PI = 6.283185307179586


def _make_spec(
    name: str,
    n: int,
    metric_entries: Mapping[tuple[int, int], str],
    structure_entries: Sequence[Mapping[tuple[int, int], str]],
    constraint_texts: Sequence[str],
    box: Sequence[tuple[float, float]],
    metadata: Mapping[str, str] | None = None,
) -> ManifoldSpec:
    """Assemble a spec from expression text; indices are 0-based here."""
    d = 4 * n
    metric_rows: list[list[FieldExpr | None]] = [[None] * d for _ in range(d)]
    for (i, j), text in metric_entries.items():
        expr = parse_scalar_field(text, d)
        metric_rows[i][j] = expr
        metric_rows[j][i] = expr
    structures = []
    for entries in structure_entries:
        rows: list[list[FieldExpr | None]] = [[None] * d for _ in range(d)]
        for (i, j), text in entries.items():
            rows[i][j] = parse_scalar_field(text, d)
        structures.append(tuple(tuple(row) for row in rows))
    constraints = tuple(parse_constraint(t, d) for t in constraint_texts)
    return ManifoldSpec(
        name=name,
        n=n,
        metric=tuple(tuple(row) for row in metric_rows),
        structures=tuple(structures),
        constraints=constraints,
        box=tuple((float(a), float(b)) for a, b in box),
        metadata=dict(metadata or {}),
    )


def _flat_spec(name: str, n: int) -> ManifoldSpec:
    """Flat chart of dimension 4n, signature (2n, 2n).

    Coordinates are grouped in four blocks of size n — (x, y, u, v) — and
    the constant structures act blockwise:

        J1: x -> +y, y -> -x, u -> -v, v -> +u
        J2: x -> +u, y -> +v, u -> -x, v -> -y
        J3: x -> -v, y -> +u, u -> -y, v -> +x
    """
    d = 4 * n
    metric = {}
    for k in range(d):
        metric[(k, k)] = "-1" if k < 2 * n else "1"
    x = lambda a: a  # noqa: E731  block offsets, a = 0..n-1
    y = lambda a: n + a  # noqa: E731
    u = lambda a: 2 * n + a  # noqa: E731
    v = lambda a: 3 * n + a  # noqa: E731
    j1, j2, j3 = {}, {}, {}
    for a in range(n):
        j1[(y(a), x(a))] = "1"
        j1[(x(a), y(a))] = "-1"
        j1[(v(a), u(a))] = "-1"
        j1[(u(a), v(a))] = "1"
        j2[(u(a), x(a))] = "1"
        j2[(v(a), y(a))] = "1"
        j2[(x(a), u(a))] = "-1"
        j2[(y(a), v(a))] = "-1"
        j3[(v(a), x(a))] = "-1"
        j3[(u(a), y(a))] = "1"
        j3[(y(a), u(a))] = "-1"
        j3[(x(a), v(a))] = "1"
    return _make_spec(
        name,
        n,
        metric,
        [j1, j2, j3],
        [],
        [(-2.0, 2.0)] * d,
        metadata={"kind": "flat", "signature": f"({2 * n},{2 * n})"},
    )


def _sphere_spec() -> ManifoldSpec:
    """Unit pseudo-sphere chart in dimension 4 (n = 1).

    Metric diag(-1, -sinh(u1)^2, cosh(u1)^2, cosh(u1)^2 cos(u3)^2); the
    structures pair coordinate directions with reciprocal coefficients so
    that each J squares to minus the identity.  The chart excludes the loci
    sinh(u1) = 0 and cos(u3) = 0 where structure components blow up.
    """
    metric = {
        (0, 0): "-1",
        (1, 1): "-sinh(u1)^2",
        (2, 2): "cosh(u1)^2",
        (3, 3): "cosh(u1)^2*cos(u3)^2",
    }
    j1 = {
        (0, 1): "-sinh(u1)",
        (1, 0): "1/sinh(u1)",
        (2, 3): "cos(u3)",
        (3, 2): "-1/cos(u3)",
    }
    j2 = {
        (0, 2): "-cosh(u1)",
        (2, 0): "1/cosh(u1)",
        (1, 3): "-coth(u1)*cos(u3)",
        (3, 1): "tanh(u1)/cos(u3)",
    }
    j3 = {
        (0, 3): "cosh(u1)*cos(u3)",
        (3, 0): "-1/(cosh(u1)*cos(u3))",
        (2, 1): "tanh(u1)",
        (1, 2): "-coth(u1)",
    }
    return _make_spec(
        "sphere",
        1,
        metric,
        [j1, j2, j3],
        ["sinh(u1)", "cos(u3)"],
        [(0.2, 1.5), (0.0, TWO_PI), (-1.2, 1.2), (0.0, TWO_PI)],
        metadata={"kind": "pseudo-sphere", "signature": "(2,2)"},
    )


def builtin_model(model_id: str) -> ManifoldSpec:
    """Return one of the built-in chart models: flat4, flat8 or sphere."""
    if model_id == "flat4":
        return _flat_spec("flat4", 1)
    if model_id == "flat8":
        return _flat_spec("flat8", 2)
    if model_id == "sphere":
        return _sphere_spec()
    raise ValueError(
        f"unknown built-in model id {model_id!r}; expected one of {BUILTIN_MODEL_IDS}"
    )
