"""Job-document CLI: reports, budgets, exit codes, reproducibility."""
from __future__ import annotations

import json
import subprocess
import sys

import pytest

from growthtight import __version__
from growthtight import cli
from growthtight.errors import InternalInvariantError


def write_job(tmp_path, command: str, params: dict, budgets: dict | None = None, **extra):
    job = {"schema": "growthtight/job-v1", "command": command, "params": params}
    if budgets is not None:
        job["budgets"] = budgets
    job.update(extra)
    path = tmp_path / f"{command}.json"
    path.write_text(json.dumps(job))
    return path


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def report_from(out: str) -> dict:
    # stdout is: table, then the canonical JSON document starting at '{'
    return json.loads(out[out.index("{") :])


class TestRunBasics:
    def test_count_job_round_trip(self, tmp_path, capsys):
        job = write_job(tmp_path, "count", {"rank": 2}, {"r_max": 3})
        code, out, err = run_cli(capsys, "run", str(job))
        assert code == 0 and err == ""
        rep = report_from(out)
        assert rep["schema"] == "growthtight/report-v1"
        assert rep["tool"] == {"name": "growthtight", "version": __version__}
        assert rep["results"]["spheres"] == [1, 4, 12, 36]
        assert rep["results"]["balls"] == [1, 5, 17, 53]
        assert rep["job"]["budgets"]["r_max"] == 3
        assert "sphere" in out.splitlines()[0]

    def test_quiet_leaves_pure_json(self, tmp_path, capsys):
        job = write_job(tmp_path, "count", {"rank": 2}, {"r_max": 2})
        code, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        assert code == 0
        assert json.loads(out)["results"]["balls"] == [1, 5, 17]

    def test_out_file_and_rerun_is_byte_identical(self, tmp_path, capsys):
        job = write_job(tmp_path, "count", {"rank": 2}, {"r_max": 4})
        first = tmp_path / "first.json"
        assert run_cli(capsys, "run", str(job), "--out", str(first))[0] == 0
        # replay the resolved job embedded in the report
        embedded = json.loads(first.read_text())["job"]
        replay = tmp_path / "replay.json"
        replay.write_text(json.dumps(embedded))
        second = tmp_path / "second.json"
        assert run_cli(capsys, "run", str(replay), "--out", str(second))[0] == 0
        assert first.read_bytes() == second.read_bytes()

    def test_csv_export(self, tmp_path, capsys):
        job = write_job(tmp_path, "count", {"rank": 2}, {"r_max": 3})
        csv = tmp_path / "counts.csv"
        run_cli(capsys, "run", str(job), "--csv", str(csv), "--quiet")
        assert csv.read_text() == "r,sphere,ball\n0,1,1\n1,4,5\n2,12,17\n3,36,53\n"

    def test_csv_path_from_the_job_document(self, tmp_path, capsys):
        csv = tmp_path / "from_job.csv"
        job = write_job(
            tmp_path, "count", {"rank": 2}, {"r_max": 2}, output={"csv": str(csv)}
        )
        run_cli(capsys, "run", str(job), "--quiet")
        assert csv.read_text().startswith("r,sphere,ball\n")

    def test_flag_overrides_land_in_the_report(self, tmp_path, capsys):
        job = write_job(tmp_path, "count", {"rank": 2}, {"r_max": 3})
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet", "--r-max", "5")
        rep = json.loads(out)
        assert rep["job"]["budgets"]["r_max"] == 5
        assert len(rep["results"]["spheres"]) == 6

    def test_default_budgets_are_resolved(self, tmp_path, capsys):
        job = write_job(tmp_path, "count", {"rank": 2})
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        budgets = json.loads(out)["job"]["budgets"]
        assert budgets == {"r_max": 10, "tol": 1e-9, "cutoff": 14}

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.strip() == f"growthtight {__version__}"


class TestCommands:
    def test_exponent_report(self, tmp_path, capsys):
        job = write_job(tmp_path, "exponent", {"rank": 2}, {"r_max": 10})
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        res = json.loads(out)["results"]
        assert res["spectral"]["lower"] <= 1.0986122886681098 <= res["spectral"]["upper"]
        assert res["subadditivity_b"] == 0.0

    def test_avoid_with_inverses(self, tmp_path, capsys):
        job = write_job(
            tmp_path, "avoid", {"rank": 2, "factors": ["a b"]}, {"r_max": 6}
        )
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        res = json.loads(out)["results"]
        assert res["spheres"][:3] == [1, 4, 11]
        assert res["bracket"]["upper"] < 1.0986
        assert res["with_inverses"]["bracket"]["upper"] < res["bracket"]["upper"]

    def test_avoid_sweep(self, tmp_path, capsys):
        job = write_job(tmp_path, "avoid", {"rank": 2, "sweep": {"max_len": 2}})
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        res = json.loads(out)["results"]
        assert res["languages"] == 16
        assert res["all_strictly_below"] is True
        assert res["worst"]["margin"] > 0
        assert len(res["entries"]) == 16

    def test_ghat_with_shorten_sweep(self, tmp_path, capsys):
        job = write_job(
            tmp_path,
            "ghat",
            {"rank": 2, "h": "a b", "m": 4, "shorten_sweep": {"g_max": 6}},
            {"r_max": 8},
        )
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        res = json.loads(out)["results"]
        assert res["spheres"][:5] == [1, 4, 12, 36, 106]
        assert res["shorten_threshold"] == 6
        assert res["gap"]["strict"] is True
        assert res["divergence"]["passed"] is True
        sweep = res["shorten_sweep"]
        assert sweep["K"] == 6
        assert sweep["checked"] == 1457
        assert sweep["failures"] == []
        assert sweep["in_ghat"] + sweep["shortened"] == sweep["checked"]

    def test_product_duality(self, tmp_path, capsys):
        job = write_job(
            tmp_path,
            "product",
            {"factors": [{"rank": 2}, {"rank": 2}], "p": "inf"},
            {"r_max": 12},
        )
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        res = json.loads(out)["results"]
        assert res["predicted"] == pytest.approx(2 * 1.0986122886681098, abs=1e-6)
        assert res["contains_predicted"] is True

    def test_quotient_with_structure_check(self, tmp_path, capsys):
        job = write_job(
            tmp_path,
            "quotient",
            {
                "factors": [{"rank": 2}, {"rank": 2}],
                "p": 1,
                "oracle": {
                    "kind": "homomorphism-to-integers",
                    "coefficients": [[1, 1], [1, -1]],
                },
                "check": {"h": ["a b", "b a-"], "K": 6},
            },
            {"r_max": 4},
        )
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        res = json.loads(out)["results"]
        assert res["balls"] == [1, 3, 5, 7, 9]
        assert res["structure_check"]["passed"] is True
        assert res["structure_check"]["checked"] == 9

    def test_tightness_verdicts(self, tmp_path, capsys):
        base = {
            "factors": [{"rank": 2}, {"rank": 2}],
            "oracle": {"kind": "factor-kernel", "kill": [1]},
        }
        tight = write_job(tmp_path, "tightness", {**base, "p": "inf"})
        _, out, _ = run_cli(capsys, "run", str(tight), "--quiet")
        assert json.loads(out)["results"]["verdict"] == "tight"
        loose = tmp_path / "loose.json"
        loose.write_text(
            json.dumps(
                {
                    "schema": "growthtight/job-v1",
                    "command": "tightness",
                    "params": {**base, "p": 1},
                }
            )
        )
        _, out, _ = run_cli(capsys, "run", str(loose), "--quiet")
        res = json.loads(out)["results"]
        assert res["verdict"] == "not-tight"
        assert res["overlap_gap"] <= 1e-6

    def test_axioms_explicit(self, tmp_path, capsys):
        job = write_job(
            tmp_path,
            "axioms",
            {"rank": 2, "axes": ["a b", "b a", "a b a"], "samples": ["b b a-"]},
        )
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        res = json.loads(out)["results"]
        assert res["mode"] == "explicit"
        assert res["xi_observed"] == 3
        assert res["within_bound"] is True
        assert res["violations"] == []

    def test_axioms_translated_axis_form(self, tmp_path, capsys):
        job = write_job(
            tmp_path,
            "axioms",
            {"rank": 2, "axes": ["a b", {"h": "a b", "translate": "b b b"}]},
        )
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        res = json.loads(out)["results"]
        assert res["xi_observed"] == 0

    def test_axioms_random_is_seed_reproducible(self, tmp_path, capsys):
        params = {"rank": 2, "random": {"seed": 5, "triples": 5, "core_max": 3}}
        job = write_job(tmp_path, "axioms", params)
        _, out1, _ = run_cli(capsys, "run", str(job), "--quiet")
        _, out2, _ = run_cli(capsys, "run", str(job), "--quiet")
        assert out1 == out2
        res = json.loads(out1)["results"]
        assert res["mode"] == "random"
        assert res["violations"] == 0
        assert res["xi_observed"] <= res["bound"]

    def test_axioms_lemma31_sweep(self, tmp_path, capsys):
        job = write_job(
            tmp_path,
            "axioms",
            {"rank": 2, "lemma31": {"h": "a b", "g_max": 3, "n_max": 6}},
        )
        _, out, _ = run_cli(capsys, "run", str(job), "--quiet")
        res = json.loads(out)["results"]
        assert res["checked"] == 52
        assert res["failures"] == 0
        assert res["branches"] == {"bounded-projection": 50, "power-in-subgroup": 2}
        assert res["d_tree"] == 0


class TestExitCodes:
    def test_malformed_json_is_invalid_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"schema": "growthtight/job-v1",\n  "command": }')
        code, _, err = run_cli(capsys, "run", str(bad))
        assert code == 2
        assert "line 2" in err and "invalid input" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "run", str(tmp_path / "nope.json"))
        assert code == 2 and "cannot read job file" in err

    def test_wrong_schema(self, tmp_path, capsys):
        bad = tmp_path / "schema.json"
        bad.write_text(json.dumps({"schema": "growthtight/job-v0", "command": "count"}))
        code, _, err = run_cli(capsys, "run", str(bad))
        assert code == 2 and "unsupported schema" in err

    def test_unknown_command(self, tmp_path, capsys):
        bad = tmp_path / "cmd.json"
        bad.write_text(json.dumps({"schema": "growthtight/job-v1", "command": "solve"}))
        code, _, err = run_cli(capsys, "run", str(bad))
        assert code == 2 and "unknown command" in err

    def test_bad_word_reports_the_token(self, tmp_path, capsys):
        job = write_job(tmp_path, "avoid", {"rank": 2, "factors": ["a c"]})
        code, _, err = run_cli(capsys, "run", str(job))
        assert code == 2
        assert "unknown letter 'c' at token 1 (rank 2)" in err

    def test_missing_parameter(self, tmp_path, capsys):
        job = write_job(tmp_path, "ghat", {"rank": 2, "m": 4})
        code, _, err = run_cli(capsys, "run", str(job))
        assert code == 2 and "missing required parameter 'h'" in err

    def test_negative_budget(self, tmp_path, capsys):
        job = write_job(tmp_path, "count", {"rank": 2}, {"r_max": -1})
        assert run_cli(capsys, "run", str(job))[0] == 2

    def test_cutoff_hits_resource_limit(self, tmp_path, capsys):
        job = write_job(
            tmp_path,
            "quotient",
            {
                "factors": [{"rank": 2}],
                "p": 1,
                "oracle": {"kind": "abelianization-kernel"},
            },
            {"r_max": 8, "cutoff": 6},
        )
        code, _, err = run_cli(capsys, "run", str(job))
        assert code == 3 and "resource limit" in err

    def test_invariant_breach_exit_code(self, tmp_path, capsys, monkeypatch):
        def boom(params, budgets):
            raise InternalInvariantError("synthetic breach")

        monkeypatch.setitem(cli.COMMANDS, "count", boom)
        job = write_job(tmp_path, "count", {"rank": 2})
        code, _, err = run_cli(capsys, "run", str(job))
        assert code == 4 and "invariant breach" in err

    def test_unexpected_exception_maps_to_internal_error(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setitem(
            cli.COMMANDS, "count", lambda p, b: (_ for _ in ()).throw(ValueError("x"))
        )
        job = write_job(tmp_path, "count", {"rank": 2})
        code, _, err = run_cli(capsys, "run", str(job))
        assert code == 4 and "internal error" in err


class TestEntryPoints:
    def test_module_invocation(self, tmp_path):
        job = write_job(tmp_path, "count", {"rank": 2}, {"r_max": 2})
        proc = subprocess.run(
            [sys.executable, "-m", "growthtight", "run", str(job), "--quiet"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["results"]["balls"] == [1, 5, 17]

    def test_console_script(self, tmp_path):
        job = write_job(tmp_path, "count", {"rank": 2}, {"r_max": 2})
        proc = subprocess.run(
            ["growthtight", "run", str(job), "--quiet"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["schema"] == "growthtight/report-v1"
