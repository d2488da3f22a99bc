"""Defect tensors and the class verdict for a chart model.

For each structure the structural tensor ``F_a`` is compared against its
Lee-form reconstruction; the difference is the defect tensor ``P_a``.  A
model belongs to the broad class for structure ``a`` when ``P_a`` vanishes,
and to the parallel (Kaehler-type) class when ``F_a`` itself vanishes.  The
report also audits Einstein / star-Einstein proportionality and flatness.

Flags are reported outcomes, not errors: a model failing a membership flag
is a perfectly healthy audit result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .curvature import (
    CurvatureBundle,
    StructuralSet,
    christoffel,
    curvature_bundle,
    structural_tensors,
)
from .manifolds import EVALUATION_MARGIN, ManifoldSpec, PointEval, evaluate_point
from .tensors import rel_residual, sup_norm

__all__ = [
    "DefectSet",
    "ClassReport",
    "ReportConsistencyError",
    "p_defects",
    "classify_point_set",
    "FLAG_ORDER",
    "W0_FD_STEP",
    "W0_FD_TOL",
]

W0_FD_STEP = 1e-4
W0_FD_TOL = 1e-5

FLAG_ORDER = (
    "W(J1)",
    "W(J2)",
    "W(J3)",
    "W",
    "W0",
    "K(J1)",
    "K(J2)",
    "K(J3)",
    "K",
    "einstein",
    "star_einstein_J2",
    "star_einstein_J3",
    "flat",
)


class ReportConsistencyError(RuntimeError):
    """An emitted report would violate one of the class-closure rules."""


@dataclass(frozen=True)
class DefectSet:
    """Defect tensors P_a plus the residual magnitudes driving the flags."""

    P: np.ndarray  # (3, d, d, d), same slot order as F
    residuals: Mapping[str, float]  # keys P1..P3, F1..F3 (relative sup-norms)
    sup_norms: Mapping[str, float]  # raw sup-norms of P1..P3 and F1..F3


@dataclass(frozen=True)
class ClassReport:
    flags: Mapping[str, str]  # flag name -> "pass" | "fail"
    residuals: Mapping[str, float]
    tol: float
    points: int
    fd_tol: float


def p_defects(p: PointEval, s: StructuralSet) -> DefectSet:
    """Defect of each structural tensor against its Lee-form reconstruction.

    For the Hermitian structure (a = 1) the reconstruction is the
    antisymmetric four-term bracket scaled by 1/(2(2n-1)); for the two
    skew structures it is the symmetric bracket scaled by 1/(4n).
    """
    n = p.n
    g = p.g
    P = np.empty_like(s.F)

    for a in range(3):
        J = p.J[a]
        theta = s.theta[a]
        theta_J = theta @ J  # (theta o J)_l = theta_m J^m_l
        gJ = g @ J  # g(x, J y)[k, j] = g_km J^m_j
        if a == 0:
            coeff = 1.0 / (2.0 * (2 * n - 1))
            bracket = (
                np.einsum("kj,l->kjl", g, theta)
                - np.einsum("kl,j->kjl", g, theta)
                - np.einsum("kj,l->kjl", gJ, theta_J)
                + np.einsum("kl,j->kjl", gJ, theta_J)
            )
        else:
            coeff = 1.0 / (4.0 * n)
            bracket = (
                np.einsum("kj,l->kjl", g, theta)
                + np.einsum("kl,j->kjl", g, theta)
                + np.einsum("kj,l->kjl", gJ, theta_J)
                + np.einsum("kl,j->kjl", gJ, theta_J)
            )
        P[a] = s.F[a] - coeff * bracket

    zeros = np.zeros_like(P[0])
    residuals = {}
    sup_norms = {}
    for a in range(3):
        residuals[f"P{a + 1}"] = rel_residual(P[a], zeros)
        residuals[f"F{a + 1}"] = rel_residual(s.F[a], zeros)
        sup_norms[f"P{a + 1}"] = sup_norm(P[a])
        sup_norms[f"F{a + 1}"] = sup_norm(s.F[a])
    return DefectSet(P=P, residuals=residuals, sup_norms=sup_norms)


def _lee_combination(p: PointEval, s: StructuralSet, a: int) -> np.ndarray:
    """theta_a o J_a + (2n/(2n-1)) theta_1 o J_1, the intersection-class covector."""
    n = p.n
    return s.theta[a] @ p.J[a] + (2.0 * n / (2 * n - 1.0)) * (s.theta[0] @ p.J[0])


def _omega_covector(spec: ManifoldSpec, coords: np.ndarray, margin: float) -> np.ndarray:
    """The 1-form theta_1 o J_1 evaluated through the full pipeline."""
    p = evaluate_point(spec, coords, margin=margin)
    s = structural_tensors(p, christoffel(p))
    return s.theta[0] @ p.J[0]


def _closedness_residual(
    spec: ManifoldSpec,
    points: Sequence[np.ndarray],
    h: float,
    margin: float,
) -> float:
    """Sup residual of d(theta_1 o J_1) over the points, by central differences."""
    worst = 0.0
    d = spec.dim
    for x in points:
        x = np.asarray(x, dtype=float)
        partial = np.empty((d, d))  # partial[i, j] = d_i omega_j
        for i in range(d):
            left = x.copy()
            right = x.copy()
            left[i] -= h
            right[i] += h
            partial[i] = (_omega_covector(spec, right, margin) - _omega_covector(spec, left, margin)) / (
                2.0 * h
            )
        d_omega = partial - partial.T
        worst = max(worst, rel_residual(d_omega, np.zeros_like(d_omega)))
    return worst


def classify_point_set(
    spec: ManifoldSpec,
    points: Sequence[Sequence[float]],
    tol: float,
    fd_step: float = W0_FD_STEP,
    fd_tol: float = W0_FD_TOL,
) -> ClassReport:
    """Aggregate class residuals over a point set and emit the flag verdict.

    Membership aggregates by supremum: classes are pointwise conditions, so
    one bad point breaks membership.  The closedness flag uses a central
    finite-difference exterior derivative (the only non-jet derivative in
    the package), with its own tolerance sized well above the O(h^2) noise.
    """
    points = [np.asarray(x, dtype=float) for x in points]
    if not points:
        raise ValueError("classify_point_set requires at least one point")

    n = spec.n
    keys_sup = [
        "W(J1)",
        "W(J2)",
        "W(J3)",
        "K(J1)",
        "K(J2)",
        "K(J3)",
        "einstein",
        "star_einstein_J2",
        "star_einstein_J3",
        "flat",
        "lee combination (J2)",
        "lee combination (J3)",
    ]
    res = {k: 0.0 for k in keys_sup}

    for x in points:
        p = evaluate_point(spec, x)
        c = christoffel(p)
        s = structural_tensors(p, c)
        defects = p_defects(p, s)
        b = curvature_bundle(p, c)

        for a in range(3):
            res[f"W(J{a + 1})"] = max(res[f"W(J{a + 1})"], defects.residuals[f"P{a + 1}"])
            res[f"K(J{a + 1})"] = max(res[f"K(J{a + 1})"], defects.residuals[f"F{a + 1}"])
        for a in (1, 2):
            combo = _lee_combination(p, s, a)
            res[f"lee combination (J{a + 1})"] = max(
                res[f"lee combination (J{a + 1})"],
                rel_residual(combo, np.zeros_like(combo)),
            )

        res["einstein"] = max(
            res["einstein"], rel_residual(b.ricci, (b.tau / (4.0 * n)) * p.g)
        )
        for a in (1, 2):
            J = p.J[a]
            r_star = np.einsum("ijkm,ml->ijkl", b.R, J)
            tau_star = float(np.einsum("il,jk,ijkl->", p.ginv, p.ginv, r_star))
            g_form = np.einsum("mi,mj->ij", J, p.g)  # g(J x, y)
            res[f"star_einstein_J{a + 1}"] = max(
                res[f"star_einstein_J{a + 1}"],
                rel_residual(b.ricci, -(tau_star / (4.0 * n)) * g_form),
            )
        res["flat"] = max(res["flat"], rel_residual(b.R, np.zeros_like(b.R)))

    res["W"] = max(
        res["W(J1)"],
        res["W(J2)"],
        res["W(J3)"],
        res["lee combination (J2)"],
        res["lee combination (J3)"],
    )
    res["K"] = max(res["K(J1)"], res["K(J2)"], res["K(J3)"])
    res["W0"] = _closedness_residual(spec, points, fd_step, EVALUATION_MARGIN)

    flags = {}
    for key in FLAG_ORDER:
        if key == "W0":
            flags[key] = "pass" if (res["W"] < tol and res["W0"] < fd_tol) else "fail"
        else:
            flags[key] = "pass" if res[key] < tol else "fail"

    _check_consistency(flags, spec.name)
    return ClassReport(flags=flags, residuals=res, tol=tol, points=len(points), fd_tol=fd_tol)


def _check_consistency(flags: Mapping[str, str], model: str) -> None:
    """Class-closure rules every emitted report must satisfy."""
    ok = lambda k: flags[k] == "pass"  # noqa: E731
    for a in (1, 2, 3):
        if ok("K") and not ok(f"K(J{a})"):
            raise ReportConsistencyError(f"{model}: K passes but K(J{a}) fails")
        if ok(f"K(J{a})") and not ok(f"W(J{a})"):
            raise ReportConsistencyError(f"{model}: K(J{a}) passes but W(J{a}) fails")
        if ok("W") and not ok(f"W(J{a})"):
            raise ReportConsistencyError(f"{model}: W passes but W(J{a}) fails")
    # Closure of pairwise intersections: two broad-class passes imply the third.
    pairs = (((1, 2), 3), ((2, 3), 1), ((3, 1), 2))
    for (a, b), c in pairs:
        if ok(f"W(J{a})") and ok(f"W(J{b})") and not ok(f"W(J{c})"):
            raise ReportConsistencyError(
                f"{model}: W(J{a}) and W(J{b}) pass but W(J{c}) fails"
            )
    # A parallel structure inside a broad intersection forces the full
    # parallel class.
    for a in (1, 2, 3):
        for b in (1, 2, 3):
            if a != b and ok(f"K(J{a})") and ok(f"W(J{b})") and not ok("K"):
                raise ReportConsistencyError(
                    f"{model}: K(J{a}) and W(J{b}) pass but K fails"
                )
