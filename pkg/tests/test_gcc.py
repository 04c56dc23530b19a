"""GCC space extraction, choice vectors, measurement, and the env integration."""

import json
import math
import random
import shutil
import stat
import subprocess
from pathlib import Path

import pytest

import optgym
from optgym.datasets import DatasetRegistry
from optgym.errors import CompilerNotFoundError, OutOfRangeActionError
from optgym.gcc import (
    categorical_actions,
    extract_space,
    parse_command_line,
    render_command_line,
    space_size_log10,
)
from optgym.gcc.backend import os_choice_vector
from optgym.gcc.measure import Measurer
from optgym.gcc.options import GccSpec, Option, apply_categorical_action
from optgym.service import shutdown_all_services

FIXTURE = "fixture://gcc-11.2.0"

HELLO_C = b"""
#include <stddef.h>
int accumulate(const int *xs, size_t n) {
    int total = 0;
    for (size_t i = 0; i < n; i++) total += xs[i] * xs[i];
    return total;
}
"""


def gcc_available() -> bool:
    return shutil.which("gcc") is not None


@pytest.fixture(scope="module")
def fixture_spec() -> GccSpec:
    return extract_space(FIXTURE)


class TestExtraction:
    def test_fixture_option_and_action_counts(self, fixture_spec):
        assert len(fixture_spec.options) == 502
        assert len(categorical_actions(fixture_spec)) == 2281

    def test_fixture_kind_breakdown(self, fixture_spec):
        kinds = {}
        for option in fixture_spec.options:
            kinds[option.kind] = kinds.get(option.kind, 0) + 1
        assert kinds == {"o-level": 1, "tristate-flag": 242, "param": 259}
        o_level = fixture_spec.options[0]
        assert o_level.cardinality == 7  # six -O levels plus absent; -Og excluded

    def test_fixture_spec_snapshot_is_byte_stable(self, fixture_spec):
        snapshot_path = (
            Path(__file__).parent.parent
            / "src/optgym/gcc/fixtures/gcc-11.2.0/spec-snapshot.json"
        )
        frozen = snapshot_path.read_text(encoding="utf-8")
        assert json.dumps(fixture_spec.to_dict(), indent=2, sort_keys=True) + "\n" == frozen

    def test_stable_order(self, fixture_spec):
        kinds = [o.kind for o in fixture_spec.options]
        assert kinds == sorted(kinds, key=("o-level", "tristate-flag", "param").index)
        flags = [o.name for o in fixture_spec.options if o.kind == "tristate-flag"]
        assert flags == sorted(flags)

    def test_unknown_fixture(self):
        with pytest.raises(CompilerNotFoundError):
            extract_space("fixture://gcc-0.0.0")

    @pytest.mark.skipif(not gcc_available(), reason="no local gcc")
    def test_live_gcc_self_consistent(self):
        spec = extract_space("gcc")
        assert len(spec.options) > 100
        expected = sum(
            o.cardinality if o.cardinality < 10 else 8 for o in spec.options
        )
        assert len(categorical_actions(spec)) == expected


class TestSpaceSize:
    def test_single_tristate(self):
        spec = GccSpec(
            compiler="x",
            version="x",
            options=(Option(name="-fx", kind="tristate-flag", bare=True, negatable=True),),
        )
        assert space_size_log10(spec) == pytest.approx(math.log10(3))

    def test_matches_independent_recomputation(self, fixture_spec):
        # Oracle: recompute from the serialized per-option cardinalities.
        total = math.fsum(
            math.log10(o["cardinality"]) for o in fixture_spec.to_dict()["options"]
        )
        assert space_size_log10(fixture_spec) == pytest.approx(total, rel=1e-12)


class TestCategoricalActions:
    def test_small_option_gets_direct_setters(self):
        spec = GccSpec(
            compiler="x",
            version="x",
            options=(Option(name="-fx", kind="tristate-flag", bare=True, negatable=True),),
        )
        actions = categorical_actions(spec)
        assert len(actions) == 3
        assert [a.set_to for a in actions] == [0, 1, 2]

    def test_action_count_formula(self, fixture_spec):
        expected = sum(
            o.cardinality if o.cardinality < 10 else 8 for o in fixture_spec.options
        )
        assert len(categorical_actions(fixture_spec)) == expected

    def test_delta_clamps_to_range(self, fixture_spec):
        big_index = next(
            i for i, o in enumerate(fixture_spec.options) if o.cardinality >= 10
        )
        actions = [
            a
            for a in categorical_actions(fixture_spec)
            if a.option_index == big_index and a.delta == -1000
        ]
        choices = fixture_spec.default_vector()
        choices[big_index] = 5
        out = apply_categorical_action(fixture_spec, choices, actions[0])
        assert out[big_index] == 0

    def test_delta_clamps_at_upper_bound(self):
        spec = GccSpec(
            compiler="x",
            version="x",
            options=(Option(name="p", kind="param", lo=0, hi=20),),
        )
        up1000 = [a for a in categorical_actions(spec) if a.delta == 1000][0]
        out = apply_categorical_action(spec, [3], up1000)
        assert out[0] == spec.options[0].cardinality - 1


class TestCommandLineRoundTrip:
    def test_random_vectors_round_trip(self, fixture_spec):
        rng = random.Random(0)
        cards = fixture_spec.cardinalities
        for _ in range(25):
            vector = [rng.randrange(min(c, 5000)) for c in cards]
            rendered = render_command_line(fixture_spec, vector)
            assert parse_command_line(fixture_spec, rendered) == vector

    def test_os_baseline_renders_to_single_flag(self, fixture_spec):
        vector = os_choice_vector(fixture_spec)
        assert render_command_line(fixture_spec, vector) == ["-Os"]

    def test_absent_everything_renders_empty(self, fixture_spec):
        assert render_command_line(fixture_spec, fixture_spec.default_vector()) == []


class TestMeasurement:
    def test_fixture_measure_is_deterministic(self, fixture_spec):
        measurer = Measurer(fixture_spec)
        vector = os_choice_vector(fixture_spec)
        a = measurer.measure(vector, HELLO_C, "obj_size")
        b = Measurer(fixture_spec).measure(vector, HELLO_C, "obj_size")
        assert a == b > 0

    def test_repeated_query_hits_cache(self, fixture_spec):
        measurer = Measurer(fixture_spec)
        vector = fixture_spec.default_vector()
        measurer.measure(vector, HELLO_C, "obj_size")
        count = measurer.compile_count
        measurer.measure(vector, HELLO_C, "obj_size")
        assert measurer.compile_count == count
        assert measurer.cache_hits == 1

    @pytest.mark.skipif(not gcc_available(), reason="no local gcc")
    def test_all_absent_matches_plain_gcc(self, tmp_path):
        spec = extract_space("gcc")
        measurer = Measurer(spec)
        measured = measurer.measure(spec.default_vector(), HELLO_C, "obj_size")
        src = tmp_path / "src.c"
        src.write_bytes(HELLO_C)
        out = tmp_path / "out.o"
        subprocess.run(["gcc", "-c", str(src), "-o", str(out)], check=True)
        assert measured == out.stat().st_size

    @pytest.mark.skipif(not gcc_available(), reason="no local gcc")
    def test_os_reduces_size_on_real_gcc(self):
        spec = extract_space("gcc")
        measurer = Measurer(spec)
        default = measurer.measure(spec.default_vector(), HELLO_C, "obj_size")
        with_os = measurer.measure(os_choice_vector(spec), HELLO_C, "obj_size")
        assert 0 < with_os <= default


def c_registry(tmp_path) -> DatasetRegistry:
    tmp_path.mkdir(parents=True, exist_ok=True)
    (tmp_path / "hello.c").write_bytes(HELLO_C)
    registry = DatasetRegistry()
    registry.add_local_dataset(tmp_path)
    return registry


class TestGccEnvironment:
    def test_categorical_and_vector_actions(self, tmp_path):
        registry = c_registry(tmp_path)
        env = optgym.make(
            "gcc-v0",
            "benchmark://user-v0/hello.c",
            reward_space="obj_size",
            datasets=registry,
            compiler=FIXTURE,
        )
        try:
            env.reset()
            start_digest = env.state_digest
            # categorical action: set -O to -Os (its direct-set action name)
            name = next(n for n in env.action_names if n == "-O[-Os]")
            first = env.step([name])
            assert env.observe("command_line") == "-Os"
            assert env.state_digest != start_digest
            # reward = previous size - new size; repeating the setting is 0
            assert env.cumulative_reward == first.rewards[0]
            reply = env.step([name])
            assert reply.rewards[0] == 0.0
        finally:
            env.close()
            shutdown_all_services()

    def test_choice_vector_space(self, tmp_path):
        registry = c_registry(tmp_path)
        env = optgym.make(
            "gcc-v0",
            "benchmark://user-v0/hello.c",
            action_space="choices",
            datasets=registry,
            compiler=FIXTURE,
        )
        try:
            env.reset()
            vector = env.observe("OsBaselineVector")
            env.step([vector])
            assert env.observe("choices") == vector
            assert env.actions == ["choices:" + ",".join(map(str, vector))]
            state = env.serialize_state()
            restored = optgym.restore_state(state, datasets=registry, compiler=FIXTURE)
            try:
                assert restored.state_digest == state.state_digest
            finally:
                restored.close()
            with pytest.raises(OutOfRangeActionError):
                env.step([[99999] * len(vector)])
        finally:
            env.close()
            shutdown_all_services()


FAKE_GCC = r"""#!/bin/sh
case "$1" in
--version) echo "gcc (FakeGCC) 9.9.0"; exit 0;;
--help=optimizers)
  echo "The following options control optimizations:"
  echo "  -O<number>                  "
  echo "  -Os                         "
  echo "  -fgood-flag                 	[disabled]"
  echo "  -fbad-flag                  	[disabled]"
  exit 0;;
--help=params)
  echo "The following options control parameters:"
  echo "  --param=tiny-knob=<0,1>     	0"
  exit 0;;
esac
out=""
bad=0
prev=""
for arg in "$@"; do
  [ "$arg" = "-fbad-flag" ] && bad=1
  [ "$prev" = "-o" ] && out="$arg"
  prev="$arg"
done
[ $bad -eq 1 ] && { echo "fake-gcc: -fbad-flag is broken" >&2; exit 1; }
printf 'fake object bytes' > "$out"
"""


class TestCompileErrorEpisode:
    def test_bad_flag_turns_into_done_with_info(self, tmp_path):
        fake = tmp_path / "fake-gcc"
        fake.write_text(FAKE_GCC)
        fake.chmod(fake.stat().st_mode | stat.S_IEXEC)
        registry = c_registry(tmp_path / "src")
        env = optgym.make(
            "gcc-v0",
            "benchmark://user-v0/hello.c",
            datasets=registry,
            compiler=str(fake),
        )
        try:
            env.reset()
            bad = next(n for n in env.action_names if n == "-fbad-flag[-fbad-flag]")
            reply = env.step([bad], observation_spaces=["obj_size"])
            assert reply.done is True
            assert reply.info["error"] == "compile-error"
            with pytest.raises(RuntimeError):
                env.step([0])
            env.reset()  # recovery: a fresh episode works
            assert env.observe("obj_size") == len(b"fake object bytes")
        finally:
            env.close()
            shutdown_all_services()
