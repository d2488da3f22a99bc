"""Dense pointwise tensors with pseudo-metric index operations.

Tensors here are plain dense arrays over one chart dimension, tagged with a
variance character per slot (``'u'`` contravariant, ``'d'`` covariant).
Metric raising/lowering, metric-mediated traces, cyclic sums and the
artifact-wide residual convention live here.

Relative residual convention, used by every audit in the package::

    res(A, B) = sup|A - B| / max(1, sup|A|, sup|B|)

which behaves like an absolute error near zero tensors and like a relative
error for large ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DenseTensor",
    "MetricPair",
    "DegenerateMetricError",
    "invert_metric",
    "contract_with_metric",
    "cyclic_sum",
    "sup_norm",
    "rel_residual",
]


class DegenerateMetricError(ValueError):
    """The metric is numerically singular and cannot be inverted."""


@dataclass(frozen=True)
class DenseTensor:
    """Dense tensor components plus one variance flag per slot."""

    comp: np.ndarray
    valence: tuple[str, ...]

    def __post_init__(self):
        comp = np.asarray(self.comp, dtype=float)
        object.__setattr__(self, "comp", comp)
        if comp.ndim != len(self.valence):
            raise ValueError(
                f"rank mismatch: {comp.ndim} axes vs {len(self.valence)} variance flags"
            )
        for v in self.valence:
            if v not in ("u", "d"):
                raise ValueError(f"variance flag must be 'u' or 'd', got {v!r}")
        if comp.ndim > 0:
            d = comp.shape[0]
            if any(s != d for s in comp.shape):
                raise ValueError(f"all axes must share one chart dimension, got {comp.shape}")

    @property
    def rank(self) -> int:
        return self.comp.ndim

    @property
    def dim(self) -> int:
        if self.comp.ndim == 0:
            raise ValueError("rank-0 tensor has no chart dimension")
        return self.comp.shape[0]


@dataclass(frozen=True)
class MetricPair:
    """Metric components, inverse components, and the (signed) determinant."""

    g: np.ndarray
    ginv: np.ndarray
    det: float

    @property
    def dim(self) -> int:
        return self.g.shape[0]


def _components(x) -> np.ndarray:
    if isinstance(x, DenseTensor):
        return x.comp
    return np.asarray(x, dtype=float)


def invert_metric(g, tol: float = 1e-12) -> MetricPair:
    """Invert a symmetric metric; the signature may be indefinite.

    Raises DegenerateMetricError when |det g| falls below ``tol``.
    """
    arr = _components(g)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"metric must be a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateMetricError("metric has non-finite entries")
    if sup_norm(arr - arr.T) > 1e-12 * max(1.0, sup_norm(arr)):
        raise ValueError("metric must be symmetric")
    det = float(np.linalg.det(arr))
    if not np.isfinite(det) or abs(det) < tol:
        raise DegenerateMetricError(f"metric is degenerate: |det| = {abs(det):.3e} < {tol:.3e}")
    ginv = np.linalg.inv(arr)
    ginv = 0.5 * (ginv + ginv.T)
    return MetricPair(arr, ginv, det)


def contract_with_metric(
    t: DenseTensor,
    slot: int,
    pair: MetricPair,
    direction: str,
    other_slot: int | None = None,
) -> DenseTensor:
    """Raise or lower one slot, or trace two slots (metric-mediated if needed).

    ``direction`` is ``'raise'``, ``'lower'`` or ``'trace'``.  Tracing a
    ``u``/``d`` slot pair contracts directly; tracing two slots of equal
    variance inserts the metric (two ``u`` slots) or its inverse (two ``d``
    slots).
    """
    if not 0 <= slot < t.rank:
        raise ValueError(f"slot {slot} out of range for rank-{t.rank} tensor")
    if direction == "raise":
        if t.valence[slot] != "d":
            raise ValueError(f"slot {slot} is already contravariant")
        moved = np.tensordot(pair.ginv, t.comp, axes=([1], [slot]))
        comp = np.moveaxis(moved, 0, slot)
        valence = t.valence[:slot] + ("u",) + t.valence[slot + 1 :]
        return DenseTensor(comp, valence)
    if direction == "lower":
        if t.valence[slot] != "u":
            raise ValueError(f"slot {slot} is already covariant")
        moved = np.tensordot(pair.g, t.comp, axes=([1], [slot]))
        comp = np.moveaxis(moved, 0, slot)
        valence = t.valence[:slot] + ("d",) + t.valence[slot + 1 :]
        return DenseTensor(comp, valence)
    if direction == "trace":
        if other_slot is None:
            raise ValueError("trace requires two slots")
        if not 0 <= other_slot < t.rank or other_slot == slot:
            raise ValueError(f"invalid trace pair ({slot}, {other_slot})")
        va, vb = t.valence[slot], t.valence[other_slot]
        if {va, vb} == {"u", "d"}:
            comp = np.trace(t.comp, axis1=slot, axis2=other_slot)
        elif va == "d":  # both covariant: contract against g^{ab}
            comp = np.tensordot(t.comp, pair.ginv, axes=([slot, other_slot], [0, 1]))
        else:  # both contravariant: contract against g_{ab}
            comp = np.tensordot(t.comp, pair.g, axes=([slot, other_slot], [0, 1]))
        keep = [k for k in range(t.rank) if k not in (slot, other_slot)]
        valence = tuple(t.valence[k] for k in keep)
        return DenseTensor(np.asarray(comp, dtype=float), valence)
    raise ValueError(f"unknown direction {direction!r}")


def cyclic_sum(t: DenseTensor, slots: tuple[int, int, int]) -> DenseTensor:
    """Sum a tensor over the three cyclic permutations of the named slots."""
    a, b, c = slots
    if len({a, b, c}) != 3:
        raise ValueError(f"cyclic slots must be distinct, got {slots}")
    for s in slots:
        if not 0 <= s < t.rank:
            raise ValueError(f"slot {s} out of range for rank-{t.rank} tensor")
    if not (t.valence[a] == t.valence[b] == t.valence[c]):
        raise ValueError("cyclic slots must share one variance")
    perm = list(range(t.rank))
    perm[a], perm[b], perm[c] = b, c, a
    once = np.transpose(t.comp, perm)
    twice = np.transpose(once, perm)
    return DenseTensor(t.comp + once + twice, t.valence)


def sup_norm(x) -> float:
    """Supremum (max-abs entry) norm of an array, tensor or scalar."""
    arr = _components(x)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def rel_residual(a, b) -> float:
    """Artifact-wide residual: sup|a-b| / max(1, sup|a|, sup|b|)."""
    na, nb = sup_norm(a), sup_norm(b)
    return sup_norm(_components(a) - _components(b)) / max(1.0, na, nb)
