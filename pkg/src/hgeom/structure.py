"""Pointwise algebraic audits of the structure triple and the metric.

The three structures must form a quaternionic triple (each squares to minus
the identity, and products anticommute cyclically), the metric must be
Hermitian for the first structure and skew-Hermitian for the other two, and
the three associated bilinear forms must land in their expected symmetry
classes.  Bilinear forms are classified into:

* ``L0`` — Hermitian for all three structures;
* ``La`` (a = 1, 2, 3) — Hermitian for structure ``a`` and skew-Hermitian
  for the other two;
* ``none`` — within tolerance of no class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .manifolds import PointEval
from .tensors import DenseTensor, rel_residual

__all__ = [
    "AssociatedForms",
    "FormClassLabel",
    "quaternionic_residuals",
    "compatibility_residuals",
    "associated_forms",
    "classify_bilinear_form",
    "CLASS_NAMES",
]

CLASS_NAMES = ("L0", "L1", "L2", "L3")


@dataclass(frozen=True)
class AssociatedForms:
    """The three bilinear forms built from the metric and the structures.

    ``Phi(x, y) = g(J1 x, y)`` (antisymmetric), ``g2(x, y) = g(J2 x, y)`` and
    ``g3(x, y) = g(J3 x, y)`` (both symmetric).
    """

    Phi: DenseTensor
    g2: DenseTensor
    g3: DenseTensor


@dataclass(frozen=True)
class FormClassLabel:
    """Classification outcome: winning label plus all four class residuals."""

    label: str  # one of CLASS_NAMES or "none"
    residuals: Mapping[str, float]


def quaternionic_residuals(p: PointEval) -> dict[str, float]:
    """Residuals of the quaternionic relations among the three structures.

    Covers the three squares, the three cyclic products, and the three
    anticommutator orientations.
    """
    J1, J2, J3 = p.J[0], p.J[1], p.J[2]
    eye = np.eye(p.dim)
    return {
        "J1J1+Id": rel_residual(J1 @ J1, -eye),
        "J2J2+Id": rel_residual(J2 @ J2, -eye),
        "J3J3+Id": rel_residual(J3 @ J3, -eye),
        "J1J2-J3": rel_residual(J1 @ J2, J3),
        "J2J3-J1": rel_residual(J2 @ J3, J1),
        "J3J1-J2": rel_residual(J3 @ J1, J2),
        "J2J1+J3": rel_residual(J2 @ J1, -J3),
        "J3J2+J1": rel_residual(J3 @ J2, -J1),
        "J1J3+J2": rel_residual(J1 @ J3, -J2),
    }


def _pullback(form: np.ndarray, J: np.ndarray) -> np.ndarray:
    """f(J x, J y) as a matrix: J^T f J."""
    return J.T @ form @ J


def compatibility_residuals(p: PointEval) -> tuple[dict[str, float], AssociatedForms]:
    """Metric compatibility with the triple, plus the associated-form identities.

    The metric must satisfy ``g(J1., J1.) = g`` and ``g(Ja., Ja.) = -g`` for
    a = 2, 3.  The associated forms then obey nine sign identities: ``Phi``
    is Hermitian for all three structures, ``g2`` is Hermitian only for the
    third, and ``g3`` only for the second.
    """
    g = p.g
    J1, J2, J3 = p.J[0], p.J[1], p.J[2]
    forms = associated_forms(p)
    phi, g2, g3 = forms.Phi.comp, forms.g2.comp, forms.g3.comp
    residuals = {
        "g(J1.,J1.)-g": rel_residual(_pullback(g, J1), g),
        "g(J2.,J2.)+g": rel_residual(_pullback(g, J2), -g),
        "g(J3.,J3.)+g": rel_residual(_pullback(g, J3), -g),
        "Phi(J1.,J1.)-Phi": rel_residual(_pullback(phi, J1), phi),
        "Phi(J2.,J2.)-Phi": rel_residual(_pullback(phi, J2), phi),
        "Phi(J3.,J3.)-Phi": rel_residual(_pullback(phi, J3), phi),
        "g2(J1.,J1.)+g2": rel_residual(_pullback(g2, J1), -g2),
        "g2(J2.,J2.)+g2": rel_residual(_pullback(g2, J2), -g2),
        "g2(J3.,J3.)-g2": rel_residual(_pullback(g2, J3), g2),
        "g3(J1.,J1.)+g3": rel_residual(_pullback(g3, J1), -g3),
        "g3(J2.,J2.)-g3": rel_residual(_pullback(g3, J2), g3),
        "g3(J3.,J3.)+g3": rel_residual(_pullback(g3, J3), -g3),
    }
    return residuals, forms


def associated_forms(p: PointEval) -> AssociatedForms:
    """Build Phi, g2, g3 with f_a(x, y) = g(J_a x, y), i.e. (J_a)^T g."""
    mats = [p.J[a].T @ p.g for a in range(3)]
    valence = ("d", "d")
    return AssociatedForms(
        Phi=DenseTensor(mats[0], valence),
        g2=DenseTensor(mats[1], valence),
        g3=DenseTensor(mats[2], valence),
    )


def classify_bilinear_form(f, p: PointEval, tol: float) -> FormClassLabel:
    """Classify a (0,2) form by its Hermitian/skew signature under the triple.

    Each class fixes a sign pattern for ``f(J_a ., J_a .)`` against ``f``;
    the class residual is the worst of its three sign identities.  The label
    is the best class when it clears ``tol``, otherwise ``none``.  Residuals
    are relative, so labels are invariant under positive scaling of ``f``.
    """
    comp = f.comp if isinstance(f, DenseTensor) else np.asarray(f, dtype=float)
    if comp.shape != (p.dim, p.dim):
        raise ValueError(f"form must have shape ({p.dim}, {p.dim})")
    pulled = [_pullback(comp, p.J[a]) for a in range(3)]
    # sign[class][structure]: +1 Hermitian, -1 skew-Hermitian
    signs = {
        "L0": (1, 1, 1),
        "L1": (1, -1, -1),
        "L2": (-1, 1, -1),
        "L3": (-1, -1, 1),
    }
    residuals = {
        name: max(rel_residual(pulled[a], sign[a] * comp) for a in range(3))
        for name, sign in signs.items()
    }
    best = min(residuals, key=residuals.get)
    label = best if residuals[best] < tol else "none"
    return FormClassLabel(label=label, residuals=residuals)
