#!/usr/bin/env python3
"""Sweep conformal gauges over a model and print the law-by-law residuals.

Runs the invariance audit for a user-supplied gauge expression and, when the
model is the sphere, the distinguished-gauge audit that solves the first
structure's gauge equation.
"""

import argparse

from hgeom import (
    BUILTIN_GAUGES,
    builtin_model,
    invariance_audit,
    kahler_gauge_audit,
    make_gauge,
    sample_domain,
)


def print_rows(title: str, report) -> None:
    print(f"\n{title}")
    for row in report.checks:
        verdict = "PASS" if row.passed else "FAIL"
        print(f"  {row.name:<36} {row.max_residual:.3e}  {verdict}")
    for key, value in report.metadata.items():
        if key.endswith("_sup_norm") or key.endswith("_trace") or key.endswith("_residual"):
            print(f"  {key}: {value}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", default="sphere")
    parser.add_argument(
        "--gauge",
        action="append",
        default=None,
        help="gauge expression; may repeat (default: a generic bounded gauge)",
    )
    parser.add_argument("--points", type=int, default=100)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--tol", type=float, default=1e-7)
    args = parser.parse_args()

    spec = builtin_model(args.model)
    points = sample_domain(spec, args.points, args.seed)
    gauges = args.gauge or ["0.2*sin(u2) + 0.1*u1"]

    for text in gauges:
        gauge = make_gauge(text, spec.dim)
        report = invariance_audit(spec, gauge.u, points, args.tol)
        print_rows(f"invariance audit, u = {gauge.text}", report)

    if args.model == "sphere":
        gauge = make_gauge("sphere-gauge", spec.dim)
        print(f"\ndistinguished gauge: u = {BUILTIN_GAUGES['sphere-gauge']}")
        report = kahler_gauge_audit(spec, gauge.u, points, args.tol)
        print_rows("gauge audit", report)
        print("  transformed-model flags:")
        for name, verdict in report.flags.items():
            print(f"    {name:<10} {verdict}")


if __name__ == "__main__":
    main()
