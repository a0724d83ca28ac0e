import json
import math

import pytest

from conftest import FIXTURES
from gindex import parse_dag, score_documents
from gindex.cli import main
from gindex.flatland import FlatlandProgram, Move, parse_program, render

IDENTICAL = str(FIXTURES / "flows" / "identical.json")
PAIR_REF = str(FIXTURES / "flows" / "pair-reference.json")
PAIR_GEN = str(FIXTURES / "flows" / "pair-generated.json")
MALFORMED = str(FIXTURES / "flows" / "malformed.txt")
SINGLE_TASK = str(FIXTURES / "manifests" / "single_task.json")
TWO_DOMAIN = str(FIXTURES / "manifests" / "two_domain.json")
CORPUS = str(FIXTURES / "corpus")


class TestScore:
    def test_identical_files_exit_zero(self, capsys):
        assert main(["score", IDENTICAL, IDENTICAL]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["delta"] == 0.0
        assert payload["theta"] == 1.0

    def test_malformed_generated_exit_two(self, capsys):
        assert main(["score", PAIR_REF, MALFORMED]) == 2
        payload = json.loads(capsys.readouterr().out)
        assert payload["delta"] == 1.0
        assert payload["errors"]["syntax"] == 1

    def test_distinct_programs_match_library(self, capsys, tmp_path):
        assert main(["score", PAIR_REF, PAIR_GEN]) == 0
        payload = json.loads(capsys.readouterr().out)
        expected = score_documents(
            open(PAIR_REF).read(), open(PAIR_GEN).read()
        )
        assert 0.0 < payload["delta"] < 1.0
        assert payload["delta"] == expected.delta
        assert payload["errors"] == expected.errors.to_dict()
        out = tmp_path / "report.json"
        assert main(["score", PAIR_REF, PAIR_GEN, "--out", str(out)]) == 0
        assert json.loads(out.read_text()) == payload

    def test_csv_format(self, capsys):
        assert main(["score", IDENTICAL, IDENTICAL, "--format", "csv"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "delta,theta,exact,syntax_errors,function_errors,dataflow_errors"
        assert lines[1].startswith("0.000000,1.000000,true,0,0,0")

    def test_missing_reference_exit_one(self, capsys):
        assert main(["score", "no-such-file.json", IDENTICAL]) == 1
        assert "error:" in capsys.readouterr().err

    def test_malformed_reference_exit_one(self, capsys):
        assert main(["score", MALFORMED, IDENTICAL]) == 1
        assert "error:" in capsys.readouterr().err


class TestOmega:
    def test_json_output(self, capsys, tmp_path):
        curriculum = tmp_path / "curriculum.json"
        curriculum.write_text(json.dumps(json.load(open(TWO_DOMAIN))["curriculum"]))
        task = str(FIXTURES / "corpus" / "cron-schedule" / "cron-schedule-0.json")
        assert main(["omega", "--task", task, "--curriculum", str(curriculum)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert {d["domain_id"] for d in payload["domains"]} == {"messaging", "scheduling"}
        by_id = {d["domain_id"]: d for d in payload["domains"]}
        assert by_id["scheduling"]["omega"] == 0.0  # the task is in that domain
        assert by_id["scheduling"]["gd"] == 1.0
        assert payload["overall"] == 0.0

    def test_csv_output(self, capsys, tmp_path):
        curriculum = tmp_path / "curriculum.json"
        curriculum.write_text(json.dumps(json.load(open(TWO_DOMAIN))["curriculum"]))
        task = str(FIXTURES / "corpus" / "telegram-reply" / "telegram-reply-0.json")
        assert main(
            ["omega", "--task", task, "--curriculum", str(curriculum), "--format", "csv"]
        ) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "domain_id,omega,gd"
        assert lines[-1].startswith("overall,0.000000,1.000000")


class TestCluster:
    def test_recovers_seven_domains(self, capsys, tmp_path):
        out = tmp_path / "partition.json"
        assert main(["cluster", CORPUS, "--out", str(out)]) == 0
        payload = json.loads(out.read_text())
        assert len(payload["clusters"]) == 7
        for cluster in payload["clusters"]:
            domains = {fn.split("/")[-2] for fn in cluster["files"]}
            assert len(domains) == 1
        assert (tmp_path / "partition.png").exists()

    def test_accepts_explicit_files(self, capsys):
        files = sorted((FIXTURES / "corpus" / "twitter-fetch").glob("*.json"))
        assert main(["cluster", *(str(f) for f in files)]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["clusters"]) == 1


class TestGIndex:
    def test_single_task_summary(self, capsys, tmp_path):
        out = tmp_path / "rep"
        assert main(["gindex", SINGLE_TASK, "--out", str(out)]) == 0
        summary = capsys.readouterr().out.strip()
        assert summary == "g-index=285.267236 tasks=1 mean_theta=1.000000"
        report = json.loads((out / "report.json").read_text())
        assert report["g_index"] == pytest.approx(285.267, abs=1e-2)
        assert (out / "report.csv").exists()
        assert (out / "report.png").exists()

    def test_byte_identical_reruns(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["gindex", TWO_DOMAIN, "--out", str(a)]) == 0
        assert main(["gindex", TWO_DOMAIN, "--out", str(b)]) == 0
        capsys.readouterr()
        assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()
        assert (a / "report.csv").read_bytes() == (b / "report.csv").read_bytes()

    def test_rho_override_changes_score(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["gindex", SINGLE_TASK, "--out", str(a)]) == 0
        assert main(["gindex", SINGLE_TASK, "--out", str(b), "--rho", "3.0"]) == 0
        capsys.readouterr()
        ga = json.loads((a / "report.json").read_text())["g_index"]
        gb = json.loads((b / "report.json").read_text())["g_index"]
        assert gb < ga
        assert gb == pytest.approx(math.sqrt(math.exp(12) / 4), abs=1e-6)

    def test_empty_test_set_exit_one(self, tmp_path, capsys):
        data = json.load(open(SINGLE_TASK))
        data["test_tasks"] = []
        manifest = tmp_path / "empty.json"
        manifest.write_text(json.dumps(data))
        assert main(["gindex", str(manifest), "--out", str(tmp_path / "rep")]) == 1
        assert "empty test set" in capsys.readouterr().err

    def test_schema_violation_reports_field_path(self, tmp_path, capsys):
        data = json.load(open(SINGLE_TASK))
        del data["curriculum"]["domains"][0]["sample_count"]
        manifest = tmp_path / "bad.json"
        manifest.write_text(json.dumps(data))
        assert main(["gindex", str(manifest), "--out", str(tmp_path / "rep")]) == 1
        assert "curriculum.domains[0].sample_count" in capsys.readouterr().err


class TestSimulate:
    def test_samples_sweep_csv(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        assert main([
            "simulate", "--sweep", "samples", "--points", "12", "--band-draws", "4",
            "--out", str(out),
        ]) == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "sweep_value,g_index,band_low,band_high"
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert (tmp_path / "sweep.png").exists()

    def test_theta_sweep_increases(self, capsys):
        assert main([
            "simulate", "--sweep", "theta", "--points", "10", "--band-draws", "0",
        ]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        values = [float(line.split(",")[1]) for line in lines[1:]]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_deterministic_output(self, capsys):
        args = ["simulate", "--sweep", "compute", "--points", "8", "--seed", "5"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert capsys.readouterr().out == first

    def test_invalid_config_exit_one(self, capsys):
        assert main(["simulate", "--sweep", "theta", "--start", "5", "--stop", "6"]) == 1
        assert "error:" in capsys.readouterr().err


class TestFlatlandCommands:
    def test_render_pbm_matches_library(self, tmp_path):
        program = FlatlandProgram((Move(10),))
        source = tmp_path / "prog.json"
        from gindex.flatland import to_flow_document

        source.write_text(to_flow_document(program))
        out = tmp_path / "image.pbm"
        assert main(["flatland", "render", str(source), "--out", str(out)]) == 0
        assert out.read_bytes() == render(program).to_pbm_bytes()

    def test_render_empty_program_blank(self, tmp_path):
        source = tmp_path / "empty.json"
        source.write_text("[]")
        out = tmp_path / "image.pbm"
        assert main(["flatland", "render", str(source), "--out", str(out)]) == 0
        body = out.read_bytes().split(b"\n", 2)[2]
        assert body == bytes(128 * 16)

    def test_score_prints_delta(self, tmp_path, capsys):
        from gindex.flatland import to_flow_document

        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        a.write_text(to_flow_document(FlatlandProgram((Move(10),))))
        b.write_text(to_flow_document(FlatlandProgram((Move(10),))))
        assert main(["flatland", "score", str(a), str(b)]) == 0
        assert capsys.readouterr().out.strip() == "delta=0.000000"

    def test_augment_writes_program_within_bound(self, tmp_path, capsys):
        from gindex.flatland import flatland_delta, to_flow_document

        source = tmp_path / "square.json"
        square = parse_program(
            json.dumps([{"type": "loop", "count": 4,
                         "body": [{"type": "move", "length": 20}, {"type": "turn", "angle": 90}]}])
        )
        source.write_text(to_flow_document(square))
        out = tmp_path / "augmented.json"
        assert main([
            "flatland", "augment", str(source), "--seed", "3", "--out", str(out),
        ]) == 0
        augmented = parse_program(out.read_text())
        assert flatland_delta(square, augmented) <= 0.3

    def test_gen_writes_dataset(self, tmp_path, capsys):
        out = tmp_path / "data"
        assert main([
            "flatland", "gen", "--out", str(out), "--count", "3", "--shapes", "lines",
        ]) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert len(manifest["samples"]) == 3
        assert manifest["start_pose"] == {"x": 64.0, "y": 64.0, "heading_degrees": 0.0}
        for entry in manifest["samples"]:
            program = parse_program((out / entry["program"]).read_text())
            image = (out / entry["image"]).read_bytes()
            assert image == render(program).to_pbm_bytes()


class TestUsageAndEnv:
    def test_unknown_subcommand_exit_one(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_missing_required_argument_exit_one(self, capsys):
        assert main(["simulate"]) == 1

    def test_env_budget_fallback(self, capsys, monkeypatch):
        monkeypatch.setenv("GINDEX_CLIQUE_BUDGET", "2")
        assert main(["score", PAIR_REF, PAIR_GEN]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["exact"] is False

    def test_env_budget_must_be_integer(self, capsys, monkeypatch):
        monkeypatch.setenv("GINDEX_CLIQUE_BUDGET", "lots")
        assert main(["score", PAIR_REF, PAIR_GEN]) == 1

    def test_flag_overrides_env(self, capsys, monkeypatch):
        monkeypatch.setenv("GINDEX_CLIQUE_BUDGET", "2")
        assert main(["score", PAIR_REF, PAIR_GEN, "--clique-budget", "100000"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["exact"] is True
