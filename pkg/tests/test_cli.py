"""Exit codes, report shape, and byte determinism of the command-line front end."""

import json

import pytest

from geomrep.cli import main

KLEIN_SPEC = {
    "degree": 4,
    "generators": [[1, 0, 3, 2], [2, 3, 0, 1]],
    "subgroups": [
        {"label": "a", "generators": [[1, 0, 3, 2]]},
        {"label": "b", "generators": [[2, 3, 0, 1]]},
        {"label": "c", "generators": [[3, 2, 1, 0]]},
    ],
}


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBuild:
    def test_default_pentagon(self, capsys):
        code, out, err = run(capsys, "build", "dihedral")
        assert code == 0
        assert err == ""
        data = json.loads(out)
        assert data["types"] == ["0", "1", "2"]
        assert len(data["elements"]) == 15
        assert len(data["incidences"]) == 45

    def test_byte_identical_runs(self, capsys):
        _, first, _ = run(capsys, "build", "gq22")
        _, second, _ = run(capsys, "build", "gq22")
        assert first == second

    def test_bad_parameter_exits_usage(self, capsys):
        code, out, err = run(capsys, "build", "dihedral", "--n", "2")
        assert code == 2
        assert out == ""
        assert "n must be >= 3" in err

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "system.json"
        code, out, _ = run(capsys, "build", "cube", "--out", str(target))
        assert code == 0
        assert out == ""
        data = json.loads(target.read_text())
        assert len(data["elements"]) == 26

    def test_coset_default_tetrahedron(self, capsys):
        code, out, _ = run(capsys, "build", "coset")
        assert code == 0
        assert len(json.loads(out)["elements"]) == 14

    def test_coset_group_file(self, capsys, tmp_path):
        spec = tmp_path / "klein.json"
        spec.write_text(json.dumps(KLEIN_SPEC))
        code, out, _ = run(capsys, "build", "coset", "--group-file", str(spec))
        assert code == 0
        data = json.loads(out)
        assert data["types"] == ["a", "b", "c"]
        assert len(data["elements"]) == 6

    def test_coset_malformed_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "build", "coset", "--group-file", str(bad))
        assert code == 2
        assert "error:" in err

    def test_coset_missing_file(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "build", "coset", "--group-file", str(tmp_path / "absent.json")
        )
        assert code == 2
        assert "error:" in err

    def test_degenerate_pgl(self, capsys):
        code, out, _ = run(capsys, "build", "pgl", "--q", "2", "--dimension", "3")
        assert code == 0
        assert len(json.loads(out)["elements"]) == 14


@pytest.fixture()
def triangle_file(capsys, tmp_path):
    path = tmp_path / "triangle.json"
    run(capsys, "build", "dihedral", "--n", "3", "--out", str(path))
    return path


@pytest.fixture()
def pentagon_file(capsys, tmp_path):
    path = tmp_path / "pentagon.json"
    run(capsys, "build", "dihedral", "--n", "5", "--out", str(path))
    return path


class TestCheck:
    def test_report_shape(self, capsys, triangle_file):
        code, out, _ = run(capsys, "check", str(triangle_file))
        assert code == 0
        report = json.loads(out)
        assert list(report) == [
            "tool",
            "version",
            "command",
            "seed",
            "threads",
            "input_digest",
            "checks",
            "timings",
        ]
        assert report["tool"] == "geomrep"
        assert report["command"] == "check"
        assert report["seed"] == 0
        assert report["threads"] == 1
        assert report["input_digest"].startswith("sha256:")
        assert report["timings"] is None
        assert report["checks"] == [
            {"property": "geometry", "value": True},
            {"property": "firm", "value": True},
            {"property": "rc", "value": True},
        ]

    def test_digest_matches_file_bytes(self, capsys, triangle_file):
        import hashlib

        _, out, _ = run(capsys, "check", str(triangle_file))
        report = json.loads(out)
        digest = hashlib.sha256(triangle_file.read_bytes()).hexdigest()
        assert report["input_digest"] == f"sha256:{digest}"

    def test_byte_identical_runs(self, capsys, pentagon_file):
        _, first, _ = run(capsys, "check", str(pentagon_file), "--properties", "rc")
        _, second, _ = run(capsys, "check", str(pentagon_file), "--properties", "rc")
        assert first == second

    def test_failing_property_exits_mismatch(self, capsys, pentagon_file):
        code, out, _ = run(capsys, "check", str(pentagon_file))
        assert code == 1
        values = {c["property"]: c["value"] for c in json.loads(out)["checks"]}
        assert values == {"geometry": False, "firm": False, "rc": False}

    def test_timings_requested(self, capsys, triangle_file):
        _, out, _ = run(capsys, "check", str(triangle_file), "--timings")
        report = json.loads(out)
        assert isinstance(report["timings"]["total_s"], float)

    def test_unknown_property(self, capsys, triangle_file):
        code, _, err = run(
            capsys, "check", str(triangle_file), "--properties", "geometry,shiny"
        )
        assert code == 2
        assert "unknown property" in err

    def test_invalid_json_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("[1, 2")
        code, _, err = run(capsys, "check", str(bad))
        assert code == 2
        assert "error:" in err

    def test_validation_violations_reported(self, capsys, tmp_path):
        data = {
            "types": ["a", "b"],
            "elements": [{"id": 0, "type": "a"}, {"id": 1, "type": "a"}],
            "incidences": [[0, 1]],
        }
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(data))
        code, _, err = run(capsys, "check", str(path))
        assert code == 2
        assert "validation: same-type incidence" in err
        assert "validation: empty type fiber" in err


class TestAut:
    def test_square_system(self, capsys, tmp_path):
        path = tmp_path / "square.json"
        run(capsys, "build", "dihedral", "--n", "4", "--out", str(path))
        code, out, _ = run(capsys, "aut", str(path))
        assert code == 0
        result = json.loads(out)["checks"][0]
        assert result["aut_order"] == "8"
        assert result["aut_i_order"] == "4"
        assert result["out_order"] == "2"


class TestVerify:
    def test_match(self, capsys):
        code, out, _ = run(
            capsys, "verify", "dihedral", "--n", "8", "--inn", "8", "--aut", "32"
        )
        assert code == 0
        check = json.loads(out)["checks"][0]
        assert check["verdict"] == "representation"
        assert check["description"] == "dihedral n=8"

    def test_weak_match_exits_mismatch(self, capsys):
        code, out, _ = run(
            capsys, "verify", "complete", "--n", "3", "--inn", "6", "--aut", "6"
        )
        assert code == 1
        assert json.loads(out)["checks"][0]["verdict"] == "weak-or-mismatch"

    def test_hemidodecahedron(self, capsys):
        code, out, _ = run(
            capsys, "verify", "hemidodeca", "--inn", "60", "--aut", "120"
        )
        assert code == 0
        assert json.loads(out)["checks"][0]["verdict"] == "representation"

    def test_degenerate_pgl_reports_pipeline(self, capsys):
        code, out, _ = run(
            capsys,
            "verify",
            "pgl",
            "--q",
            "2",
            "--dimension",
            "3",
            "--inn",
            "168",
            "--aut",
            "336",
        )
        assert code == 0
        checks = json.loads(out)["checks"]
        assert checks[0]["verdict"] == "representation"
        extra = checks[1]
        assert extra["duality_extends"] is None
        assert extra["frobenius_extends"] is False
        assert extra["frobenius_type_action"] is None
        assert extra["truncation_aut_order"] == "336"

    def test_non_prime_power_q(self, capsys):
        code, _, err = run(
            capsys, "verify", "pgl", "--q", "6", "--inn", "1", "--aut", "1"
        )
        assert code == 2
        assert "not a prime power" in err


class TestFree:
    def test_selected_checks_pass(self, capsys):
        code, out, _ = run(
            capsys, "free", "rose", "--check", "rank,intersections,action"
        )
        assert code == 0
        checks = json.loads(out)["checks"]
        assert [c["name"] for c in checks] == ["rank", "intersections", "action"]
        assert all(c["ok"] for c in checks)
        assert checks[0]["rank"] == 4
        assert checks[1]["checked"] == 11
        assert checks[2]["order"] == "8"

    def test_ft_check_with_short_bound(self, capsys):
        code, out, _ = run(
            capsys, "free", "rose", "--check", "ft", "--length-bound", "4"
        )
        assert code == 0
        check = json.loads(out)["checks"][0]
        assert check["pairs_checked"] == 32
        assert check["counterexamples"] == []

    def test_unknown_check(self, capsys):
        code, _, err = run(capsys, "free", "rose", "--check", "sparkle")
        assert code == 2
        assert "unknown free-group check" in err


class TestExport:
    def test_dot_output(self, capsys, triangle_file):
        code, out, _ = run(capsys, "export", str(triangle_file), "--dot")
        assert code == 0
        assert out.startswith("graph incidence {")
        assert out.rstrip().endswith("}")

    def test_format_required(self, capsys, triangle_file):
        code, _, err = run(capsys, "export", str(triangle_file))
        assert code == 2
        assert "export format required" in err
