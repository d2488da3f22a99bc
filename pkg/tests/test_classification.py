"""Membership flags, defect tensors, and report-consistency rules."""

import numpy as np
import pytest

from hgeom import (
    FLAG_ORDER,
    ReportConsistencyError,
    christoffel,
    classify_point_set,
    evaluate_point,
    p_defects,
    structural_tensors,
)
from hgeom.classification import W0_FD_STEP, W0_FD_TOL, _check_consistency


class TestDefectTensors:
    def test_flat_defects_vanish(self, flat4, flat4_points):
        for x in flat4_points[:50]:
            p = evaluate_point(flat4, x)
            d = p_defects(p, structural_tensors(p, christoffel(p)))
            assert max(d.sup_norms.values()) == 0.0

    def test_sphere_first_defect_vanishes_others_do_not(self, sphere, sphere_points):
        sup = {"P1": 0.0, "P2": 0.0, "P3": 0.0}
        for x in sphere_points[:50]:
            p = evaluate_point(sphere, x)
            d = p_defects(p, structural_tensors(p, christoffel(p)))
            for key in sup:
                sup[key] = max(sup[key], d.sup_norms[key])
        assert sup["P1"] < 1e-12
        # measured over 200 seeded points (seed 1): sup|P2| = 3.17,
        # sup|P3| = 4.21 — many orders above the class tolerance
        assert sup["P2"] > 1e-5
        assert sup["P3"] > 1e-5

    def test_defect_set_carries_structural_sup_norms(self, sphere_ref):
        d = p_defects(sphere_ref, structural_tensors(sphere_ref, christoffel(sphere_ref)))
        assert set(d.sup_norms) == {"P1", "P2", "P3", "F1", "F2", "F3"}
        assert d.sup_norms["F1"] > 1.0  # the sphere is not Kaehler for J1


class TestFlatClassification:
    def test_all_flags_pass(self, flat4, flat4_points):
        report = classify_point_set(flat4, flat4_points, 1e-8)
        assert tuple(report.flags) == FLAG_ORDER
        assert all(v == "pass" for v in report.flags.values())
        assert report.points == len(flat4_points)
        assert report.tol == 1e-8
        assert report.fd_tol == W0_FD_TOL

    def test_flat8_flags_pass(self, flat8, flat8_points):
        report = classify_point_set(flat8, flat8_points[:50], 1e-8)
        assert all(v == "pass" for v in report.flags.values())

    def test_flat_residuals_are_tiny(self, flat4, flat4_points):
        report = classify_point_set(flat4, flat4_points[:50], 1e-8)
        for key in ("W(J1)", "K(J1)", "einstein", "flat"):
            assert report.residuals[key] < 1e-12


@pytest.fixture(scope="module")
def report(sphere, sphere_points):
    return classify_point_set(sphere, sphere_points[:60], 1e-8)


class TestSphereClassification:
    def test_flag_verdicts(self, report):
        expected = {
            "W(J1)": "pass",
            "W(J2)": "fail",
            "W(J3)": "fail",
            "W": "fail",
            "W0": "fail",
            "K(J1)": "fail",
            "K(J2)": "fail",
            "K(J3)": "fail",
            "K": "fail",
            "einstein": "pass",
            "star_einstein_J2": "fail",
            "star_einstein_J3": "fail",
            "flat": "fail",
        }
        assert dict(report.flags) == expected

    def test_flag_order_is_stable(self, report):
        assert tuple(report.flags) == FLAG_ORDER

    def test_einstein_residual_is_tiny(self, report):
        assert report.residuals["einstein"] < 1e-10

    def test_failed_flags_have_large_residuals(self, report):
        for key in ("W(J2)", "W(J3)", "K(J1)", "flat"):
            assert report.residuals[key] > 1e-3

    def test_closedness_residual_is_reported(self, report):
        # d(theta1 o J1) = 0 on the sphere: the 1-form is exact, so the FD
        # closedness residual is small even though W0 fails through W
        assert report.residuals["W0"] < W0_FD_TOL
        assert report.flags["W0"] == "fail"
        assert W0_FD_STEP == 1e-4


class TestConsistencyRules:
    def test_accepts_coherent_flags(self, flat4, flat4_points):
        classify_point_set(flat4, flat4_points[:20], 1e-8)  # must not raise

    def test_rejects_parallel_without_membership(self):
        flags = {name: "pass" for name in FLAG_ORDER}
        flags["K(J2)"] = "fail"
        with pytest.raises(ReportConsistencyError, match="K passes"):
            _check_consistency(flags, "synthetic")

    def test_rejects_membership_closure_violation(self):
        flags = {name: "fail" for name in FLAG_ORDER}
        flags["W(J1)"] = "pass"
        flags["W(J2)"] = "pass"
        # closure: passing two broad classes forces the third
        with pytest.raises(ReportConsistencyError):
            _check_consistency(flags, "synthetic")

    def test_rejects_parallel_membership_without_broad(self):
        flags = {name: "fail" for name in FLAG_ORDER}
        flags["K(J1)"] = "pass"
        with pytest.raises(ReportConsistencyError):
            _check_consistency(flags, "synthetic")


class TestInputValidation:
    def test_empty_point_set_rejected(self, sphere):
        with pytest.raises(ValueError, match="at least one point"):
            classify_point_set(sphere, [], 1e-8)
