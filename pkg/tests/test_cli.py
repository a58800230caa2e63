"""CLI subcommands: determinism, error codes, and the train/eval flow."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from arctutor.cli import main
from arctutor.service import replay_log

from helpers import dump_model


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGen:
    def test_deterministic_bytes(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(capsys, "gen", "--users", "20", "--seed", "1",
                   "--out", str(a))[0] == 0
        assert run(capsys, "gen", "--users", "20", "--seed", "1",
                   "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_different_seeds_differ(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "gen", "--users", "20", "--seed", "1", "--out", str(a))
        run(capsys, "gen", "--users", "20", "--seed", "2", "--out", str(b))
        assert a.read_bytes() != b.read_bytes()

    def test_too_few_users(self, tmp_path, capsys):
        code, _, err = run(capsys, "gen", "--users", "2", "--seed", "1",
                           "--out", str(tmp_path / "x.json"))
        assert code == 1
        assert err.startswith("ERROR ")


class TestTrainEval:
    def test_pipeline_end_to_end(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.json"
        model = tmp_path / "model.json"
        held = tmp_path / "held.json"
        assert run(capsys, "gen", "--users", "60", "--seed", "11",
                   "--out", str(corpus))[0] == 0
        code, out, _ = run(capsys, "train", "--corpus", str(corpus),
                           "--seed", "11", "--out", str(model))
        assert code == 0
        report = json.loads(out)
        assert report["rules"]["HLG"] >= 1 and report["rules"]["LLG"] >= 1
        assert 1 <= min(
            r["weight"] for r in json.loads(model.read_text())["rules"]) <= 100
        assert (tmp_path / "model.report.json").exists()

        assert run(capsys, "gen", "--users", "40", "--seed", "12",
                   "--out", str(held))[0] == 0
        code, out, _ = run(capsys, "eval", "--model", str(model),
                           "--corpus", str(held), "--prefixes", "0,1")
        assert code == 0
        table = json.loads(out)["accuracy"]
        assert set(table) == {"0", "1"}
        assert table["1"] >= 0.8

    def test_train_determinism(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.json"
        run(capsys, "gen", "--users", "30", "--seed", "4", "--out", str(corpus))
        models = []
        for name in ("m1.json", "m2.json"):
            path = tmp_path / name
            assert run(capsys, "train", "--corpus", str(corpus),
                       "--seed", "4", "--out", str(path))[0] == 0
            models.append(path.read_bytes())
        assert models[0] == models[1]

    def test_too_strict_thresholds_error(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.json"
        run(capsys, "gen", "--users", "30", "--seed", "4", "--out", str(corpus))
        code, _, err = run(capsys, "train", "--corpus", str(corpus),
                           "--seed", "4", "--min-support", "1.0",
                           "--min-confidence", "1.0",
                           "--out", str(tmp_path / "m.json"))
        assert code == 1
        assert err.startswith("ERROR NoRulesForCluster")


@pytest.fixture()
def session_fixture(tmp_path):
    from test_service import drive_llg, fresh_runtime
    model = tmp_path / "model.json"
    dump_model(model)
    problem = tmp_path / "problem.json"
    problem.write_text(Path("src/arctutor/data/problems/chain.json").read_text())

    from arctutor.problems import load_problem
    from arctutor.classifier import load_model
    from arctutor.explain import PageTemplates
    from arctutor.hints import load_catalog
    from arctutor.service import SessionRuntime
    runtime = SessionRuntime(
        problem_name="chain", spec=load_problem(problem.read_text()),
        model=load_model(json.loads(model.read_text())),
        catalog=load_catalog(), templates=PageTemplates.load(), session_id="x")
    drive_llg(runtime, 50)
    runtime.get_explanation("WhyHint")
    runtime.post_page_closed("WhyHint", dwell_ms=2000)
    log = tmp_path / "session.jsonl"
    log.write_text(runtime.export_log())
    return runtime, log, problem, model


class TestReplayStats:
    def test_replay_digest_matches_live(self, session_fixture, tmp_path, capsys):
        runtime, log, problem, model = session_fixture
        trace = tmp_path / "trace.jsonl"
        code, out, _ = run(capsys, "replay", "--log", str(log),
                           "--problem", str(problem), "--model", str(model),
                           "--trace", str(trace))
        assert code == 0
        result = json.loads(out)
        assert result["digest"] == runtime.digest()
        assert result["events"] == 50
        assert result["pages"] == 1
        assert len(trace.read_text().splitlines()) == 51

    def test_stats_command_matches_live(self, session_fixture, capsys):
        runtime, log, problem, model = session_fixture
        code, out, _ = run(capsys, "stats", "--log", str(log),
                           "--problem", str(problem), "--model", str(model))
        assert code == 0
        assert json.loads(out) == runtime.stats()

    def test_corrupt_line_errors_with_line_number(self, session_fixture,
                                                  tmp_path, capsys):
        _, log, problem, model = session_fixture
        lines = log.read_text().splitlines()
        lines[2] = '{"broken":'
        bad = tmp_path / "bad.jsonl"
        bad.write_text("\n".join(lines))
        code, _, err = run(capsys, "replay", "--log", str(bad),
                           "--problem", str(problem), "--model", str(model))
        assert code == 1
        assert "line 3" in err


class TestUsageErrors:
    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["gen"])
        assert exc.value.code == 2
