"""Manifest loading and the command-line audit front end."""

import json
from pathlib import Path

import numpy as np
import pytest

from hgeom import (
    ManifestError,
    builtin_model,
    evaluate_point,
    load_manifest,
    run_audit,
)

FIXTURES = Path(__file__).parent / "fixtures"

MINIMAL_FLAT = """\
name = "mini"
n = 1

[metric]
"1,1" = "-1"
"2,2" = "-1"
"3,3" = "1"
"4,4" = "1"

[[J1]]
i = 1
j = 2
expr = "-1"

[[J1]]
i = 2
j = 1
expr = "1"

[[J1]]
i = 3
j = 4
expr = "-1"

[[J1]]
i = 4
j = 3
expr = "1"

[[J2]]
i = 1
j = 3
expr = "-1"

[[J2]]
i = 3
j = 1
expr = "1"

[[J2]]
i = 2
j = 4
expr = "1"

[[J2]]
i = 4
j = 2
expr = "-1"

[[J3]]
i = 1
j = 4
expr = "-1"

[[J3]]
i = 4
j = 1
expr = "1"

[[J3]]
i = 2
j = 3
expr = "-1"

[[J3]]
i = 3
j = 2
expr = "1"

[box]
u1 = [-2.0, 2.0]
u2 = [-2.0, 2.0]
u3 = [-2.0, 2.0]
u4 = [-2.0, 2.0]
"""


class TestManifestLoading:
    def test_fixture_round_trips_to_builtin_sphere(self):
        loaded = load_manifest(FIXTURES / "sphere.toml")
        assert loaded == builtin_model("sphere")

    def test_fixture_evaluates_identically(self, sphere_ref):
        loaded = load_manifest(FIXTURES / "sphere.toml")
        p = evaluate_point(loaded, np.array([1.0, 0.5, 0.3, 0.7]))
        assert np.array_equal(p.g, sphere_ref.g)
        assert np.array_equal(p.d2g, sphere_ref.d2g)

    def test_minimal_manifest_loads(self, tmp_path):
        path = tmp_path / "mini.toml"
        path.write_text(MINIMAL_FLAT)
        spec = load_manifest(path)
        assert spec.name == "mini"
        assert spec.dim == 4
        assert spec.constraints == ()
        assert spec.metadata == {}


def _write_variant(tmp_path, replace_from, replace_to, name="bad.toml"):
    path = tmp_path / name
    path.write_text(MINIMAL_FLAT.replace(replace_from, replace_to))
    return path


class TestManifestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ManifestError, match="cannot read manifest"):
            load_manifest(tmp_path / "absent.toml")

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("name = ")
        with pytest.raises(ManifestError, match="not valid TOML"):
            load_manifest(path)

    def test_missing_name(self, tmp_path):
        path = _write_variant(tmp_path, 'name = "mini"\n', "")
        with pytest.raises(ManifestError, match="name: required field missing"):
            load_manifest(path)

    def test_nonpositive_n(self, tmp_path):
        path = _write_variant(tmp_path, "n = 1", "n = 0")
        with pytest.raises(ManifestError, match="positive integer"):
            load_manifest(path)

    def test_missing_structure_table(self, tmp_path):
        text = MINIMAL_FLAT
        start = text.index("[[J3]]")
        end = text.index("[box]")
        path = tmp_path / "noj3.toml"
        path.write_text(text[:start] + text[end:])
        with pytest.raises(ManifestError, match="J3: required field missing"):
            load_manifest(path)

    def test_malformed_metric_key(self, tmp_path):
        path = _write_variant(tmp_path, '"1,1" = "-1"', '"1;1" = "-1"')
        with pytest.raises(ManifestError, match='metric."1;1"'):
            load_manifest(path)

    def test_metric_index_out_of_range(self, tmp_path):
        path = _write_variant(tmp_path, '"1,1" = "-1"', '"1,5" = "-1"')
        with pytest.raises(ManifestError, match='metric."1,5"'):
            load_manifest(path)

    def test_duplicate_metric_pair(self, tmp_path):
        path = _write_variant(tmp_path, '"2,2" = "-1"', '"2,2" = "-1"\n"1,1" = "-2"')
        with pytest.raises(ManifestError, match="duplicate"):
            load_manifest(path)

    def test_parse_error_carries_path(self, tmp_path):
        path = _write_variant(tmp_path, '"1,1" = "-1"', '"1,1" = "-coshh(u1)"')
        with pytest.raises(ManifestError, match='metric."1,1"') as err:
            load_manifest(path)
        assert "coshh" in str(err.value)

    def test_structure_entry_parse_error_carries_path(self, tmp_path):
        path = _write_variant(tmp_path, 'expr = "-sinh(u1)"', 'expr = "u1 +"', name="j.toml")
        # MINIMAL_FLAT has no sinh entry; corrupt the first J1 expr instead
        path.write_text(MINIMAL_FLAT.replace('expr = "-1"', 'expr = "u1 +"', 1))
        with pytest.raises(ManifestError, match=r"J1\[0\]\.expr"):
            load_manifest(path)

    def test_duplicate_structure_entry(self, tmp_path):
        extra = '\n[[J1]]\ni = 1\nj = 2\nexpr = "-2"\n'
        path = tmp_path / "dup.toml"
        path.write_text(MINIMAL_FLAT.replace("[[J2]]", extra + "\n[[J2]]", 1))
        with pytest.raises(ManifestError, match=r"duplicate entry for \(1,2\)"):
            load_manifest(path)

    def test_structure_index_out_of_range(self, tmp_path):
        path = _write_variant(tmp_path, "i = 1\nj = 2", "i = 1\nj = 9")
        with pytest.raises(ManifestError, match="out of range"):
            load_manifest(path)

    def test_bad_constraint(self, tmp_path):
        path = _write_variant(tmp_path, 'n = 1\n', 'n = 1\ndomain = ["cosh("]\n')
        with pytest.raises(ManifestError, match=r"domain\[0\]"):
            load_manifest(path)

    def test_missing_box_interval(self, tmp_path):
        path = _write_variant(tmp_path, "u4 = [-2.0, 2.0]\n", "")
        with pytest.raises(ManifestError, match="box.u4"):
            load_manifest(path)

    def test_malformed_box_interval(self, tmp_path):
        path = _write_variant(tmp_path, "u4 = [-2.0, 2.0]", "u4 = [-2.0]")
        with pytest.raises(ManifestError, match=r"box\.u4: expected \[lo, hi\]"):
            load_manifest(path)

    def test_inverted_box_interval(self, tmp_path):
        path = _write_variant(tmp_path, "u4 = [-2.0, 2.0]", "u4 = [2.0, -2.0]")
        with pytest.raises(ManifestError, match="strictly below"):
            load_manifest(path)

    def test_nonstring_metadata(self, tmp_path):
        path = _write_variant(tmp_path, "n = 1\n", "n = 1\n[metadata]\nweight = 3\n")
        # TOML table placement: append metadata at the end instead
        path.write_text(MINIMAL_FLAT + "\n[metadata]\nweight = 3\n")
        with pytest.raises(ManifestError, match="metadata.weight"):
            load_manifest(path)


class TestExitCodes:
    def test_audit_flat_passes(self, capsys):
        code = run_audit(["audit", "--model", "flat4", "--points", "20", "--no-timestamp"])
        out = capsys.readouterr().out
        assert code == 0
        doc = json.loads(out)
        assert doc["model"] == "flat4"
        assert all(row["pass"] for row in doc["checks"])
        assert all(row["max_residual"] == 0.0 for row in doc["checks"])

    def test_audit_accepts_manifest_path(self, capsys):
        code = run_audit(
            [
                "audit",
                "--model",
                str(FIXTURES / "sphere.toml"),
                "--points",
                "10",
                "--no-timestamp",
            ]
        )
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert doc["model"] == "sphere"

    def test_failing_check_returns_one(self, capsys):
        # an arbitrary gauge does not solve the gauge equation on the sphere
        code = run_audit(
            [
                "conformal",
                "--model",
                "sphere",
                "--gauge",
                "expr:0.3*u2",
                "--points",
                "10",
                "--no-timestamp",
            ]
        )
        doc = json.loads(capsys.readouterr().out)
        assert code == 1
        failing = [row["name"] for row in doc["checks"] if not row["pass"]]
        assert "gauge audit: gauge equation" in failing

    def test_unknown_model_returns_two(self, capsys):
        code = run_audit(["audit", "--model", "nope"])
        captured = capsys.readouterr()
        assert code == 2
        assert captured.out == ""
        assert "error:" in captured.err

    def test_unknown_gauge_returns_two(self, capsys):
        code = run_audit(["conformal", "--model", "sphere", "--gauge", "nope"])
        captured = capsys.readouterr()
        assert code == 2
        assert "unknown gauge" in captured.err

    def test_gauge_parse_error_returns_two(self, capsys):
        code = run_audit(["conformal", "--model", "sphere", "--gauge", "expr:cosh("])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_nonpositive_points_returns_two(self, capsys):
        code = run_audit(["audit", "--model", "flat4", "--points", "0"])
        assert code == 2
        assert "--points" in capsys.readouterr().err

    def test_usage_error_raises_system_exit(self, capsys):
        with pytest.raises(SystemExit) as err:
            run_audit(["audit"])
        assert err.value.code == 2


class TestOutputFormat:
    def test_json_is_deterministic_without_timestamp(self, capsys):
        args = [
            "classify",
            "--model",
            "sphere",
            "--points",
            "30",
            "--seed",
            "3",
            "--no-timestamp",
        ]
        run_audit(args)
        first = capsys.readouterr().out
        run_audit(args)
        second = capsys.readouterr().out
        assert first == second

    def test_timestamp_present_by_default(self, capsys):
        run_audit(["classify", "--model", "flat4", "--points", "5"])
        doc = json.loads(capsys.readouterr().out)
        assert "timestamp" in doc
        assert doc["timestamp"].endswith("+00:00")

    def test_float_rendering_uses_15_significant_digits(self, capsys):
        run_audit(["audit", "--model", "sphere", "--points", "5", "--no-timestamp"])
        out = capsys.readouterr().out
        assert '"tol": 1e-08' in out
        for token in out.split():
            token = token.rstrip(",")
            try:
                float(token)
            except ValueError:
                continue
            digits = token.split("e")[0].replace("-", "").replace(".", "").lstrip("0")
            assert len(digits) <= 15

    def test_text_format(self, capsys):
        code = run_audit(
            ["audit", "--model", "flat4", "--points", "5", "--format", "text", "--no-timestamp"]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "flat4" in out
        assert "PASS" in out

    def test_conventions_recorded_in_metadata(self, capsys):
        run_audit(["audit", "--model", "flat4", "--points", "5", "--no-timestamp"])
        doc = json.loads(capsys.readouterr().out)
        assert "residual_convention" in doc["metadata"]
        assert "s_tensor_signs" in doc["metadata"]


class TestDocumentedInvocations:
    def test_classify_sphere(self, capsys):
        code = run_audit(
            ["classify", "--model", "sphere", "--points", "100", "--seed", "7", "--no-timestamp"]
        )
        doc = json.loads(capsys.readouterr().out)
        assert code == 0  # flags report outcomes; they do not gate the exit status
        assert doc["flags"]["W(J1)"] == "pass"
        assert doc["flags"]["W"] == "fail"
        assert doc["flags"]["einstein"] == "pass"
        assert doc["checks"] == []

    def test_audit_flat4_all_zero(self, capsys):
        code = run_audit(["audit", "--model", "flat4", "--no-timestamp"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        assert {row["max_residual"] for row in doc["checks"]} == {0.0}
        assert doc["flags"]["class(g)"] == "L1"

    def test_conformal_sphere_gauge(self, capsys):
        code = run_audit(
            [
                "conformal",
                "--model",
                "sphere",
                "--gauge",
                "sphere-gauge",
                "--points",
                "60",
                "--no-timestamp",
            ]
        )
        doc = json.loads(capsys.readouterr().out)
        assert code == 0
        rows = {row["name"]: row for row in doc["checks"]}
        assert rows["gauge audit: gauge equation"]["pass"]
        assert rows["gauge audit: theta1bar vanishes"]["pass"]
        assert rows["gauge audit: F1bar vanishes"]["pass"]
        assert doc["flags"]["K(J1)"] == "pass"
        assert float(doc["metadata"]["F2bar_sup_norm"]) > 1e-5
