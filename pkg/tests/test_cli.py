"""CLI surface tests via click's in-process runner."""

import json

import pytest
from click.testing import CliRunner

import optgym
from optgym.cli import main
from optgym.service import shutdown_all_services

SEED1 = "benchmark://tinyir-gen-v0/seed-1"
SUITE_DEAD = "benchmark://tinyir-suite-v0/dead-wide"


@pytest.fixture()
def runner():
    return CliRunner()


def make_state_file(tmp_path, tamper=False):
    env = optgym.make("tinyir-v0", SEED1, reward_space="InstructionCount")
    try:
        env.reset()
        env.step([0, 1, 2])
        state = env.serialize_state()
    finally:
        env.close()
    if tamper:
        state.state_digest = "0" * 64
    path = tmp_path / "state.json"
    state.save(path)
    return path


class TestReplayValidate:
    def test_replay_ok(self, runner, tmp_path):
        path = make_state_file(tmp_path)
        result = runner.invoke(main, ["replay", str(path)])
        assert result.exit_code == 0, result.output
        assert "replay ok" in result.output

    def test_validate_ok(self, runner, tmp_path):
        path = make_state_file(tmp_path)
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 0
        assert "VALID" in result.output

    def test_validate_tampered_exits_nonzero(self, runner, tmp_path):
        path = make_state_file(tmp_path, tamper=True)
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 1
        assert "INVALID" in result.output


class TestDatasets:
    def test_list(self, runner):
        result = runner.invoke(main, ["datasets", "list"])
        assert result.exit_code == 0
        assert "tinyir-gen-v0" in result.output
        assert "generator" in result.output

    def test_add(self, runner, tmp_path):
        (tmp_path / "p.tir").write_text(".inputs 1\nr0 = input 0\noutput r0\n")
        result = runner.invoke(main, ["datasets", "add", str(tmp_path)])
        assert result.exit_code == 0
        assert "benchmark://user-v0/p.tir" in result.output


class TestSearchAndReport:
    def test_search_writes_results_and_report_reads_them(self, runner, tmp_path):
        out = tmp_path / "results"
        result = runner.invoke(
            main,
            [
                "search",
                "--env=tinyir-v0",
                f"--benchmark={SUITE_DEAD}",
                "--technique=greedy",
                "--budget-evals=100",
                f"--out={out}",
            ],
        )
        assert result.exit_code == 0, result.output
        assert "greedy on" in result.output
        report = runner.invoke(main, ["report", str(out)])
        assert report.exit_code == 0, report.output
        assert "greedy" in report.output
        assert "x" in report.output


class TestGccSpace:
    def test_fixture_summary(self, runner):
        result = runner.invoke(main, ["gcc-space", "--compiler=fixture://gcc-11.2.0"])
        assert result.exit_code == 0, result.output
        assert "options:  502" in result.output
        assert "actions:  2281" in result.output

    def test_fixture_dump_is_valid_json(self, runner):
        result = runner.invoke(
            main, ["gcc-space", "--compiler=fixture://gcc-11.2.0", "--dump"]
        )
        assert result.exit_code == 0
        spec = json.loads(result.output)
        assert len(spec["options"]) == 502


class TestDb:
    def test_dedup_and_export(self, runner, tmp_path):
        from optgym.tdb import TransitionLogger, TransitionStore

        store_path = tmp_path / "t.db"
        store = TransitionStore(store_path)
        env = TransitionLogger(
            optgym.make("tinyir-v0", SEED1, reward_space="InstructionCount"), store
        )
        env.reset()
        env.step([0])
        env.step([1])
        env.flush()
        env.close()
        store.close()

        result = runner.invoke(main, ["db", "dedup", str(store_path)])
        assert result.exit_code == 0, result.output
        assert "created 2 transitions" in result.output

        result = runner.invoke(
            main, ["db", "export", str(store_path), "--out", str(tmp_path / "exp")]
        )
        assert result.exit_code == 0
        assert (tmp_path / "exp" / "steps.tsv").exists()


class TestShell:
    def test_scripted_session(self, tmp_path, monkeypatch, capsys):
        import io

        from optgym.shell import run_shell

        script = "reset\nstep dce\nstate\nsave {}\nactions\nexit\n".format(
            tmp_path / "shell-state.json"
        )
        monkeypatch.setattr("sys.stdin", io.StringIO(script))
        run_shell("tinyir-v0", SUITE_DEAD)
        out = capsys.readouterr().out
        assert "episode 1 started" in out
        assert "reward: +9" in out
        assert (tmp_path / "shell-state.json").exists()
        state = optgym.EnvState.load(tmp_path / "shell-state.json")
        assert state.actions == ["dce"]


def teardown_module(module):
    shutdown_all_services()
