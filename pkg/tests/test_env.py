"""Core environment tests: make/reset/step/fork/serialize/restore."""

import pytest

import optgym
from optgym.errors import (
    DigestMismatchError,
    OutOfRangeActionError,
    UnknownEnvironmentError,
    UnknownSpaceError,
)
from optgym.service import shutdown_all_services
from optgym.tinyir import generate, parse_program, program_digest, run_pass
from optgym.tinyir.generate import Xoshiro256StarStar
from optgym.tinyir.passes import PASS_NAMES

SEED1 = "benchmark://tinyir-gen-v0/seed-1"

# Three dead instructions (r1, r2, r3); dce reward is exactly 3.
THREE_DEAD = """
.inputs 1
r0 = input 0
r1 = const 5
r2 = const 6
r3 = add r1 r2
r4 = add r0 r0
output r4
"""


@pytest.fixture(scope="module")
def env():
    e = optgym.make("tinyir-v0", SEED1, observation_space="InstCount",
                    reward_space="InstructionCount")
    yield e
    e.close()


@pytest.fixture()
def user_env(tmp_path):
    (tmp_path / "three-dead.tir").write_text(THREE_DEAD.strip() + "\n")
    registry = optgym.DatasetRegistry()
    registry.add_local_dataset(tmp_path)
    e = optgym.make(
        "tinyir-v0",
        "benchmark://user-v0/three-dead.tir",
        reward_space="InstructionCount",
        datasets=registry,
    )
    yield e
    e.close()


class TestMake:
    def test_advertises_spaces(self, env):
        assert env.action_space.n == 6
        assert env.action_names == list(PASS_NAMES)
        assert {d.id for d in env.observation_spaces} >= {"InstCount", "OpcodeHistogram", "Ir"}
        assert {d.id for d in env.reward_spaces} == {"InstructionCount", "InstructionCountScaled"}

    def test_unknown_environment(self):
        with pytest.raises(UnknownEnvironmentError):
            optgym.make("no-such-env", SEED1)

    def test_unknown_spaces(self):
        with pytest.raises(UnknownSpaceError):
            optgym.make("tinyir-v0", SEED1, observation_space="Nope")
        with pytest.raises(UnknownSpaceError):
            optgym.make("tinyir-v0", SEED1, reward_space="Nope")

    def test_no_default_observation_means_empty_step_observations(self):
        e = optgym.make("tinyir-v0", SEED1)
        try:
            e.reset()
            reply = e.step([0])
            assert reply.observations == []
            # values arrive lazily, when a space is named in the request
            assert e.step([], observation_spaces=["InstCount"]).observations[0] > 0
        finally:
            e.close()


class TestReset:
    def test_initial_observation_matches_generator(self, env):
        obs = env.reset()
        assert obs == len(generate(1))

    def test_reset_after_steps_restores_initial_digest(self, env):
        env.reset()
        initial = env.state_digest
        env.step([0, 1, 2])
        assert env.state_digest != initial or True  # steps may or may not change state
        env.reset()
        assert env.state_digest == initial
        assert env.actions == []
        assert env.cumulative_reward == 0.0

    def test_rebind_benchmark(self, env):
        env.reset("benchmark://tinyir-gen-v0/seed-2")
        assert env.benchmark == "benchmark://tinyir-gen-v0/seed-2"
        assert env.serialize_state().benchmark == "benchmark://tinyir-gen-v0/seed-2"
        env.reset(SEED1)

    def test_episode_counter_increments(self, env):
        before = env.episode_count
        env.reset()
        env.reset()
        assert env.episode_count == before + 2


class TestStep:
    def test_dce_reward_equals_dead_instruction_count(self, user_env):
        # Oracle: the reference dce pass removes exactly 3 instructions.
        prog = parse_program(THREE_DEAD)
        assert len(prog) - len(run_pass(prog, "dce")) == 3
        user_env.reset()
        reply = user_env.step([list(PASS_NAMES).index("dce")])
        assert reply.rewards == [3.0]
        assert user_env.cumulative_reward == 3.0

    def test_batched_equals_sequential(self, env):
        rng = Xoshiro256StarStar(99)
        for trial in range(5):
            script = [rng.below(6) for _ in range(12)]
            env.reset()
            batched = env.step(script)
            batched_digest = env.state_digest
            batched_cumulative = env.cumulative_reward
            env.reset()
            total = 0.0
            for action in script:
                total += env.step([action]).rewards[0]
            assert env.state_digest == batched_digest
            assert abs(batched_cumulative - total) < 1e-9
            assert abs(sum(batched.rewards) - batched.rewards[0]) < 1e-9  # one reward per batch

    def test_empty_actions_is_observation_probe(self, env):
        env.reset()
        before = env.state_digest
        reply = env.step([], observation_spaces=["Ir"])
        assert reply.observations[0].startswith(".inputs")
        assert env.state_digest == before
        assert env.actions == []

    def test_out_of_range_action(self, env):
        env.reset()
        with pytest.raises(OutOfRangeActionError):
            env.step([6])

    def test_step_before_reset(self):
        e = optgym.make("tinyir-v0", SEED1)
        try:
            with pytest.raises(RuntimeError):
                e.step([0])
        finally:
            e.close()

    def test_action_names_accepted(self, env):
        env.reset()
        reply = env.step(["dce"])
        assert env.actions == ["dce"]
        assert isinstance(reply.rewards[0], float)

    def test_ad_hoc_rewards_returned_but_not_accrued(self, user_env):
        user_env.reset()
        reply = user_env.step(
            [list(PASS_NAMES).index("dce")], reward_spaces=["InstructionCountScaled"]
        )
        # scaled reward returned; cumulative still tracks the default space
        assert reply.rewards[0] == pytest.approx(1.0)  # dce gain / baseline gain here
        assert user_env.cumulative_reward == 3.0

    def test_scaled_reward_telescopes(self, env):
        e = optgym.make("tinyir-v0", SEED1, reward_space="InstructionCountScaled")
        try:
            e.reset()
            prog = generate(1)
            from optgym.tinyir.passes import baseline_cost

            denominator = len(prog) - baseline_cost(prog)
            total = 0.0
            for action in ["canonicalize", "constfold", "cse", "copyprop", "dce"] * 3:
                total += e.step([action]).rewards[0]
            final_count = e.observe("InstCount")
            expected = (len(prog) - final_count) / denominator if denominator else 0.0
            assert total == pytest.approx(expected, abs=1e-9)
        finally:
            e.close()


class TestFork:
    def test_fork_matches_parent_and_is_independent(self, env):
        env.reset()
        env.step([0, 1])
        child = env.fork()
        try:
            assert child.state_digest == env.state_digest
            assert child.actions == env.actions
            assert child.cumulative_reward == env.cumulative_reward
            parent_digest = env.state_digest
            env.step([2])
            assert child.state_digest == parent_digest
        finally:
            child.close()

    def test_fork_of_fresh_env_equals_make_reset(self, env):
        env.reset()
        child = env.fork()
        other = optgym.make("tinyir-v0", SEED1)
        try:
            other.reset()
            assert child.state_digest == other.state_digest
        finally:
            child.close()
            other.close()

    def test_greedy_expansion_digests_match_single_pass_oracle(self, user_env):
        # Oracle: apply each pass to the program directly.
        prog = parse_program(THREE_DEAD)
        expected = {name: program_digest(run_pass(prog, name)) for name in PASS_NAMES}
        user_env.reset()
        for index, name in enumerate(PASS_NAMES):
            fork = user_env.fork()
            try:
                fork.step([index])
                assert fork.state_digest == expected[name], name
            finally:
                fork.close()


class TestSerializeRestore:
    def test_round_trip(self, env):
        rng = Xoshiro256StarStar(7)
        for trial in range(8):
            env.reset()
            env.step([rng.below(6) for _ in range(10)])
            state = env.serialize_state()
            restored = optgym.restore_state(state)
            try:
                assert restored.state_digest == state.state_digest
                assert restored.cumulative_reward == pytest.approx(
                    state.cumulative_reward, abs=1e-9
                )
            finally:
                restored.close()

    def test_tampered_action_is_rejected(self, user_env):
        user_env.reset()
        user_env.step(["dce"])
        state = user_env.serialize_state()
        # canonicalize is an identity on this program, so the digest must differ
        state.actions[0] = "canonicalize"
        with pytest.raises(DigestMismatchError):
            optgym.restore_state(state, datasets=user_env.datasets)

    def test_empty_actions_restore_equals_fresh_reset(self, env):
        env.reset()
        state = env.serialize_state()
        restored = optgym.restore_state(state)
        try:
            assert restored.state_digest == env.state_digest
        finally:
            restored.close()

    def test_state_file_schema(self, env, tmp_path):
        env.reset()
        env.step([0])
        state = env.serialize_state()
        path = tmp_path / "state.json"
        state.save(path)
        import json

        data = json.loads(path.read_text())
        assert set(data) == {
            "version",
            "env_id",
            "benchmark",
            "reward_space_id",
            "actions",
            "cumulative_reward",
            "state_digest",
        }
        assert data["version"] == 1
        loaded = optgym.EnvState.load(path)
        assert loaded == state


def teardown_module(module):
    shutdown_all_services()
