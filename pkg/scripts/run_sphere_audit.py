#!/usr/bin/env python3
"""Reproduce the pseudo-sphere worked example end to end.

Prints the reference-point component values, the full residual audit over a
seeded sample, the classification flags, and the brute-force defect-magnitude
survey used to freeze the constants in the test suite.
"""

import argparse
import math

import numpy as np

from hgeom import (
    builtin_model,
    christoffel,
    classify_point_set,
    compatibility_residuals,
    curvature_bundle,
    curvature_identity_residuals,
    evaluate_point,
    p_defects,
    quaternionic_residuals,
    rel_residual,
    sample_domain,
    sectional_curvature,
    structural_identity_residuals,
    structural_tensors,
)

REF = np.array([1.0, 0.5, 0.3, 0.7])


def reference_point_report() -> None:
    spec = builtin_model("sphere")
    p = evaluate_point(spec, REF)
    c = christoffel(p)
    s = structural_tensors(p, c)
    b = curvature_bundle(p, c)
    print("reference point u =", REF.tolist())
    print("  metric diagonal:", np.diag(p.g).tolist())
    print(f"  Gamma^2_12 = {c.gamma[1, 0, 1]:.15g}   (coth u1 = {1 / math.tanh(1.0):.15g})")
    print(f"  Gamma^1_22 = {c.gamma[0, 1, 1]:.15g}   (-sinh u1 cosh u1 = {-math.sinh(1.0) * math.cosh(1.0):.15g})")
    print(f"  Gamma^3_44 = {c.gamma[2, 3, 3]:.15g}   (sin u3 cos u3 = {math.sin(0.3) * math.cos(0.3):.15g})")
    theta_expected = 2 * math.sinh(1.0) ** 2 / math.cosh(1.0)
    print(f"  theta_1(d/du2) = {s.theta[0, 1]:.15g}   (2 sinh^2 u1 / cosh u1 = {theta_expected:.15g})")
    print(f"  ricci vs 3g residual: {rel_residual(b.ricci, 3.0 * p.g):.3e}")
    print(f"  tau = {b.tau:.15g}")
    print(f"  weyl sup-norm: {np.max(np.abs(b.weyl)):.3e}")
    k = sectional_curvature(p, b, np.array([1.0, 0, 0, 0]), np.array([0, 1.0, 0, 0]))
    print(f"  sectional curvature of the (1,2) coordinate plane: {k:.15g}")


def residual_audit(points: np.ndarray, tol: float) -> None:
    spec = builtin_model("sphere")
    groups: dict[str, float] = {}
    for x in points:
        p = evaluate_point(spec, x)
        c = christoffel(p)
        s = structural_tensors(p, c)
        b = curvature_bundle(p, c)
        for name, value in (
            ("quaternionic", max(quaternionic_residuals(p).values())),
            ("compatibility", max(compatibility_residuals(p)[0].values())),
            ("structural identities", max(structural_identity_residuals(p, s).values())),
            ("curvature identities", max(curvature_identity_residuals(p, b).values())),
        ):
            groups[name] = max(groups.get(name, 0.0), value)
    print(f"\nresidual audit over {len(points)} points (tol {tol:g}):")
    for name, value in groups.items():
        verdict = "PASS" if value < tol else "FAIL"
        print(f"  {name:<24} {value:.3e}  {verdict}")


def defect_survey(points: np.ndarray) -> None:
    spec = builtin_model("sphere")
    sup = {key: 0.0 for key in ("P1", "P2", "P3", "F1", "F2", "F3")}
    for x in points:
        p = evaluate_point(spec, x)
        d = p_defects(p, structural_tensors(p, christoffel(p)))
        for key in sup:
            sup[key] = max(sup[key], d.sup_norms[key])
    print("\ndefect-magnitude survey (raw sup-norms):")
    for key, value in sup.items():
        print(f"  sup|{key}| = {value:.6g}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=200)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--tol", type=float, default=1e-8)
    args = parser.parse_args()

    spec = builtin_model("sphere")
    points = sample_domain(spec, args.points, args.seed)

    reference_point_report()
    residual_audit(points, args.tol)
    defect_survey(points)

    report = classify_point_set(spec, points, args.tol)
    print("\nclassification flags:")
    for name, verdict in report.flags.items():
        print(f"  {name:<10} {verdict}")


if __name__ == "__main__":
    main()
