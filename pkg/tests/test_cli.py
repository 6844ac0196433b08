"""CLI behavior: parsing, exit codes, batch semantics, determinism."""

import json
import re

import pytest

from strangedual.cli import (
    CliConfigError,
    document_exit_code,
    load_batch,
    main,
    normalize_instance,
    parse_rational,
    parse_vector,
    run_batch,
    run_instance,
    to_jsonable,
)
from strangedual.surfaces import elliptic_k3, generic_k3
from fractions import Fraction


E = elliptic_k3()


def _strip_timing(text: str) -> str:
    return re.sub(r'"timing_ms": \d+', '"timing_ms": 0', text)


class TestParsing:
    def test_vector_elliptic(self):
        v = parse_vector("2:1,7:-1", E)
        assert (v.r, v.c1.coeffs, v.s) == (2, (1, 7), -1)

    def test_vector_generic(self):
        g = generic_k3(8)
        v = parse_vector("2:1:-2", g)
        assert (v.r, v.c1.coeffs, v.s) == (2, (1,), -2)

    def test_vector_errors(self):
        with pytest.raises(CliConfigError):
            parse_vector("2:1", E)
        with pytest.raises(CliConfigError):
            parse_vector("2:1:3", E)  # needs two c1 coefficients
        with pytest.raises(CliConfigError):
            parse_vector("a:1,2:3", E)

    def test_rational(self):
        assert parse_rational("8/3") == Fraction(8, 3)
        assert parse_rational(5) == Fraction(5)
        with pytest.raises(CliConfigError):
            parse_rational("x/y")

    def test_unknown_check_rejected(self):
        with pytest.raises(CliConfigError):
            normalize_instance({"checks": ["no-such-check"]}, 0)

    def test_unknown_field_rejected(self):
        with pytest.raises(CliConfigError):
            normalize_instance({"checks": ["nu"], "extra": 1}, 0)

    def test_fraction_serialization(self):
        assert to_jsonable(Fraction(8, 3)) == "8/3"
        assert to_jsonable({"m": Fraction(4)}) == {"m": "4/1"}


class TestRunInstance:
    def test_case_study_all_pass(self):
        spec = normalize_instance(
            {
                "name": "case",
                "surface": {"kind": "elliptic-k3"},
                "params": {"r": 2, "s": 2, "a": 9, "b": 9},
                "checks": ["nu", "line-bundle", "chi-vanishing", "dimension-match", "exclusions"],
            },
            0,
        )[0]
        report = run_instance(spec)
        statuses = {k: v["status"] for k, v in report["results"].items()}
        assert set(statuses.values()) == {"pass"}
        assert report["results"]["nu"]["nu"] == -2
        assert report["results"]["dimension-match"]["left"] == 48620

    def test_divisibility_error_skips_dependents(self):
        spec = normalize_instance(
            {
                "name": "bad",
                "params": {"r": 2, "s": 2, "a": 9, "b": 8},
                "checks": ["nu", "line-bundle", "dimension-match"],
            },
            0,
        )[0]
        report = run_instance(spec)
        results = report["results"]
        assert results["nu"]["status"] == "error:divisibility"
        assert results["line-bundle"]["status"] == "skipped"
        assert "nu" in results["line-bundle"]["reason"]
        assert results["dimension-match"]["status"] == "skipped"
        assert document_exit_code({"instances": [report]}) == 1

    def test_nu_bound_error_is_distinct(self):
        spec = normalize_instance(
            {"params": {"r": 2, "s": 2, "a": 5, "b": 5}, "checks": ["nu"]}, 0
        )[0]
        report = run_instance(spec)
        assert report["results"]["nu"]["status"] == "error:nu-bound"

    def test_missing_params(self):
        spec = normalize_instance({"checks": ["nu"]}, 0)[0]
        report = run_instance(spec)
        assert report["results"]["nu"]["status"] == "error:missing-params"

    def test_suitability_check(self):
        spec = normalize_instance(
            {
                "params": {"v": "2:1,0:-2", "m": 5},
                "checks": ["suitability"],
                "bounds": {"coeff_bound": 3},
            },
            0,
        )[0]
        report = run_instance(spec)
        assert report["results"]["suitability"]["status"] == "pass"
        assert report["results"]["suitability"]["max_wall"] == "4/1"

    def test_hypotheses_from_tower_params(self):
        spec = normalize_instance(
            {
                "params": {"r": 2, "s": 3, "a": 13, "b": 14},
                "checks": ["hypotheses-T2"],
            },
            0,
        )[0]
        report = run_instance(spec)
        assert report["results"]["hypotheses-T2"]["status"] == "pass"


class TestBatch:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_batch(str(path)) == []

    def test_two_specs_two_reports(self, tmp_path):
        path = tmp_path / "two.yaml"
        path.write_text(
            "instances:\n"
            "  - name: one\n"
            "    params: {r: 2, s: 2, a: 9, b: 9}\n"
            "    checks: [nu]\n"
            "  - name: two\n"
            "    params: {r: 2, s: 3, a: 13, b: 14}\n"
            "    checks: [nu]\n"
        )
        doc = run_batch(load_batch(str(path)))
        assert [r["spec"]["name"] for r in doc["instances"]] == ["one", "two"]

    def test_grid_expansion(self, tmp_path):
        path = tmp_path / "grid.yaml"
        path.write_text(
            "instances:\n"
            "  - name: g\n"
            "    grid: {a: [9, 10], b: [9, 9]}\n"
            "    params: {r: 2, s: 2}\n"
            "    checks: [nu]\n"
        )
        instances = load_batch(str(path))
        assert len(instances) == 2
        assert instances[0]["name"] == "g[a=9,b=9]"
        assert instances[1]["params"]["a"] == 10

    def test_yaml_parse_error(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("instances: [}{")
        with pytest.raises(CliConfigError):
            load_batch(str(path))


class TestMainExitCodes:
    def test_exit_zero(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(
            [
                "check",
                "--r", "2", "--s", "2", "--a", "9", "--b", "9",
                "--checks", "nu,line-bundle,dimension-match",
                "--out", str(out),
                "--quiet",
            ]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["instances"][0]["results"]["nu"]["status"] == "pass"

    def test_exit_one_on_check_error(self, tmp_path):
        code = main(
            [
                "check",
                "--r", "2", "--s", "2", "--a", "9", "--b", "8",
                "--checks", "nu",
                "--out", str(tmp_path / "r.json"),
                "--quiet",
            ]
        )
        assert code == 1

    def test_exit_two_on_config_error(self, capsys):
        code = main(["check", "--checks", "definitely-not-a-check", "--quiet"])
        assert code == 2

    def test_exit_two_on_missing_file(self):
        assert main(["batch", "/nonexistent/specs.yaml", "--quiet"]) == 2

    def test_strata_subcommand(self, tmp_path):
        out = tmp_path / "s.json"
        code = main(["strata", "--v", "2:1,0:-2", "--coeff-bound", "3",
                     "--out", str(out), "--quiet"])
        assert code == 0
        doc = json.loads(out.read_text())
        walls = doc["instances"][0]["results"]["strata-audit"]["vectors"][0]["walls"]
        by_m = {w["m_value"]: w for w in walls}
        assert by_m["4/1"]["strata"] == 3
        assert by_m["4/1"]["min_codim"] == 2

    def test_fm_verify_subcommand(self, tmp_path):
        out = tmp_path / "fm.json"
        assert main(["fm-verify", "--rmax", "4", "--amax", "8",
                     "--out", str(out), "--quiet"]) == 0

    def test_determinism_modulo_timing(self, tmp_path):
        spec = tmp_path / "d.yaml"
        spec.write_text(
            "instances:\n"
            "  - name: case\n"
            "    params: {r: 2, s: 2, a: 9, b: 9}\n"
            "    checks: [nu, line-bundle, dimension-match, exclusions]\n"
            "  - name: walls\n"
            "    params: {v: '2:1,0:-2'}\n"
            "    checks: [strata-audit]\n"
        )
        out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
        assert main(["batch", str(spec), "--out", str(out1), "--quiet"]) == 0
        assert main(["batch", str(spec), "--out", str(out2), "--quiet"]) == 0
        assert _strip_timing(out1.read_text()) == _strip_timing(out2.read_text())
