"""Wrapper behavior: TimeLimit, CycleOverBenchmarks, ActionSubset, derived spaces."""

import pytest

import optgym
from optgym.errors import InvalidWrapperConfigError, OutOfRangeActionError
from optgym.service import shutdown_all_services
from optgym.wrappers import (
    ActionSubset,
    CycleOverBenchmarks,
    DerivedObservation,
    TimeLimit,
    with_action_histogram,
)

SEED1 = "benchmark://tinyir-gen-v0/seed-1"
SEED2 = "benchmark://tinyir-gen-v0/seed-2"


@pytest.fixture()
def env():
    e = optgym.make("tinyir-v0", SEED1, reward_space="InstructionCount")
    yield e
    e.close()


class TestTimeLimit:
    def test_forces_done_at_limit(self, env):
        wrapped = TimeLimit(env, 45)
        wrapped.reset()
        for i in range(44):
            assert wrapped.step([i % 6]).done is False
        assert wrapped.step([0]).done is True
        with pytest.raises(RuntimeError):
            wrapped.step([0])

    def test_batch_counts_every_action(self, env):
        wrapped = TimeLimit(env, 5)
        wrapped.reset()
        assert wrapped.step([0, 1, 2, 3, 4]).done is True

    def test_reset_clears_counter(self, env):
        wrapped = TimeLimit(env, 2)
        wrapped.reset()
        wrapped.step([0, 1])
        wrapped.reset()
        assert wrapped.step([0]).done is False

    def test_invalid_config(self, env):
        with pytest.raises(InvalidWrapperConfigError):
            TimeLimit(env, 0)

    def test_neutral_sentinel_is_transparent(self, env):
        env.reset()
        bare_digests = [env.step([i % 6]).done or env.state_digest for i in range(8)]
        wrapped = TimeLimit(env, None)
        wrapped.reset()
        wrapped_digests = [wrapped.step([i % 6]).done or wrapped.state_digest for i in range(8)]
        assert bare_digests == wrapped_digests


class TestCycleOverBenchmarks:
    def test_cycles_with_wraparound(self, env):
        wrapped = CycleOverBenchmarks(env, [SEED1, SEED2])
        wrapped.reset()
        assert wrapped.benchmark == SEED1
        wrapped.reset()
        assert wrapped.benchmark == SEED2
        wrapped.reset()
        assert wrapped.benchmark == SEED1

    def test_explicit_benchmark_does_not_advance(self, env):
        wrapped = CycleOverBenchmarks(env, [SEED1, SEED2])
        wrapped.reset("benchmark://tinyir-gen-v0/seed-9")
        assert wrapped.benchmark == "benchmark://tinyir-gen-v0/seed-9"
        wrapped.reset()
        assert wrapped.benchmark == SEED1

    def test_empty_list_rejected(self, env):
        with pytest.raises(InvalidWrapperConfigError):
            CycleOverBenchmarks(env, [])


class TestActionSubset:
    def test_renumbers_space(self, env):
        wrapped = ActionSubset(env, [1, 3])
        assert wrapped.action_space.n == 2
        assert wrapped.action_names == ["dce", "copyprop"]

    def test_translates_indices(self, env):
        wrapped = ActionSubset(env, [1, 3])
        wrapped.reset()
        wrapped.step([0])
        assert wrapped.actions == ["dce"]

    def test_out_of_range_subset_index(self, env):
        wrapped = ActionSubset(env, [1, 3])
        wrapped.reset()
        with pytest.raises(OutOfRangeActionError):
            wrapped.step([2])

    def test_full_subset_is_transparent(self, env):
        env.reset()
        env.step([0, 1, 2, 3, 4, 5])
        bare = env.state_digest
        wrapped = ActionSubset(env, list(range(6)))
        wrapped.reset()
        wrapped.step([0, 1, 2, 3, 4, 5])
        assert wrapped.state_digest == bare

    def test_invalid_configs(self, env):
        for bad in ([], [0, 0], [9]):
            with pytest.raises(InvalidWrapperConfigError):
                ActionSubset(env, bad)


class TestDerivedObservation:
    def test_composite_with_action_histogram(self, env):
        wrapped = with_action_histogram(env, "OpcodeHistogram")
        obs = wrapped.reset()
        assert len(obs) == 7 + 6
        assert obs[7:] == [0] * 6
        obs = wrapped.step([1]).observations[0]
        assert obs[7:] == [0, 1, 0, 0, 0, 0]
        obs = wrapped.step([1, 4]).observations[0]
        assert obs[7:] == [0, 2, 0, 0, 1, 0]

    def test_mixed_request_order_preserved(self, env):
        wrapped = DerivedObservation(
            env, "Doubled", ["InstCount"], lambda values, e: 2 * values[0]
        )
        wrapped.reset()
        values = wrapped.observe(["InstCount", "Doubled"])
        assert values[1] == 2 * values[0]

    def test_unknown_source_rejected(self, env):
        with pytest.raises(InvalidWrapperConfigError):
            DerivedObservation(env, "X", ["Nope"], lambda v, e: v)

    def test_wrappers_compose(self, env):
        wrapped = TimeLimit(ActionSubset(env, [1, 2]), 3)
        wrapped.reset()
        assert wrapped.step([0, 1, 0]).done is True
        assert wrapped.actions == ["dce", "cse", "dce"]


class TestForkRewrapping:
    def test_fork_preserves_wrapper_state(self, env):
        wrapped = TimeLimit(env, 10)
        wrapped.reset()
        wrapped.step([0, 1, 2])
        child = wrapped.fork()
        try:
            assert child.max_steps == 10
            assert child._elapsed == 3
            assert child.state_digest == wrapped.state_digest
        finally:
            child.close()


def teardown_module(module):
    shutdown_all_services()
