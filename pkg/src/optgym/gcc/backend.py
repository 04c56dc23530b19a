"""GCC flag tuning as a compilation service backend."""

from __future__ import annotations

import hashlib
import json

from optgym.errors import OutOfRangeActionError, UnknownBenchmarkError, UnknownSpaceError
from optgym.gcc.extract import extract_space
from optgym.gcc.measure import Measurer
from optgym.gcc.options import (
    GccSpec,
    apply_categorical_action,
    categorical_actions,
    render_command_line,
)
from optgym.service.session import Backend, CompilationSession
from optgym.spaces import SpaceDescriptor, SpaceKind


def os_choice_vector(spec: GccSpec) -> list[int]:
    """The choice vector that reproduces plain -Os."""
    vector = spec.default_vector()
    for i, option in enumerate(spec.options):
        if option.kind == "o-level" and "-Os" in option.values:
            vector[i] = 1 + option.values.index("-Os")
    return vector


def state_digest(source_digest: str, choices: list[int]) -> str:
    body = source_digest + ":" + ",".join(map(str, choices))
    return hashlib.sha256(body.encode()).hexdigest()


class GccSession(CompilationSession):
    def __init__(self, backend: "GccBackend"):
        self._backend = backend
        self._choices: list[int] = []
        self._source = b""
        self._source_digest = ""
        self._action_space_id = "categorical"

    def get_action_spaces(self):
        return self._backend.action_spaces()

    def get_observation_spaces(self):
        return self._backend.observation_spaces()

    def init(self, action_space_id: str, benchmark_uri: str, artifact: bytes) -> None:
        self._action_space_id = action_space_id or "categorical"
        self._source = artifact
        self._source_digest = hashlib.sha256(artifact).hexdigest()
        self._choices = self._backend.spec.default_vector()

    def _set_vector(self, vector: list[int]) -> None:
        spec = self._backend.spec
        if len(vector) != len(spec.options):
            raise OutOfRangeActionError(
                f"choice vector length {len(vector)} != {len(spec.options)}"
            )
        for i, (choice, option) in enumerate(zip(vector, spec.options)):
            if not 0 <= choice < option.cardinality:
                raise OutOfRangeActionError(
                    f"choice {choice} out of range for option {i} ({option.name})"
                )
        self._choices = list(vector)

    def apply_action(self, action) -> tuple[bool, bool]:
        if isinstance(action, list):
            self._set_vector([int(x) for x in action])
            return False, False
        if isinstance(action, str):
            if action.startswith("choices:"):
                self._set_vector([int(x) for x in action[len("choices:") :].split(",")])
                return False, False
            index = self._backend.action_index.get(action)
            if index is None:
                raise OutOfRangeActionError(f"unknown action {action!r}")
            action = index
        if not isinstance(action, int) or not 0 <= action < len(self._backend.actions):
            raise OutOfRangeActionError(f"action {action!r} out of range")
        self._choices = apply_categorical_action(
            self._backend.spec, self._choices, self._backend.actions[action]
        )
        return False, False

    def set_observation(self, observation_space_id: str):
        backend = self._backend
        if observation_space_id in ("obj_size", "asm_size", "asm"):
            return backend.measurer.measure(self._choices, self._source, observation_space_id)
        if observation_space_id == "choices":
            return list(self._choices)
        if observation_space_id == "command_line":
            return " ".join(render_command_line(backend.spec, self._choices))
        if observation_space_id == "StateDigest":
            return state_digest(self._source_digest, self._choices)
        if observation_space_id == "OsBaselineVector":
            return os_choice_vector(backend.spec)
        if observation_space_id == "SpecJson":
            return json.dumps(backend.spec.to_dict())
        raise UnknownSpaceError(observation_space_id)

    def fork(self) -> "GccSession":
        child = GccSession(self._backend)
        child._action_space_id = self._action_space_id
        child._source = self._source
        child._source_digest = self._source_digest
        child._choices = list(self._choices)
        return child


class GccBackend(Backend):
    name = "gcc"

    def __init__(self, cache_capacity: int = 128, compiler: str = "gcc", **options):
        super().__init__(cache_capacity, **options)
        self.spec = extract_space(compiler)
        self.actions = categorical_actions(self.spec)
        self.action_index = {a.name: i for i, a in enumerate(self.actions)}
        self.measurer = Measurer(self.spec)

    def action_spaces(self):
        cards = self.spec.cardinalities
        return [
            SpaceDescriptor(
                id="categorical",
                kind=SpaceKind.DISCRETE,
                display_name="flat categorical actions",
                n=len(self.actions),
                names=[a.name for a in self.actions],
            ),
            SpaceDescriptor(
                id="choices",
                kind=SpaceKind.INTEGER_BOX,
                display_name="choice vector",
                lower=[0] * len(cards),
                upper=[c - 1 for c in cards],
            ),
        ]

    def observation_spaces(self):
        return [
            SpaceDescriptor(
                id="obj_size", kind=SpaceKind.SCALAR_RANGE, lo=0.0, hi=None,
                deterministic=True, platform_dependent=True,
            ),
            SpaceDescriptor(
                id="asm_size", kind=SpaceKind.SCALAR_RANGE, lo=0.0, hi=None,
                deterministic=True, platform_dependent=True,
            ),
            SpaceDescriptor(id="asm", kind=SpaceKind.UTF8_STRING),
            SpaceDescriptor(id="command_line", kind=SpaceKind.UTF8_STRING),
            SpaceDescriptor(
                id="choices", kind=SpaceKind.INT64_VECTOR, length=max(len(self.spec.options), 1)
            ),
            SpaceDescriptor(
                id="OsBaselineVector",
                kind=SpaceKind.INT64_VECTOR,
                length=max(len(self.spec.options), 1),
            ),
            SpaceDescriptor(id="SpecJson", kind=SpaceKind.UTF8_STRING),
            SpaceDescriptor(id="StateDigest", kind=SpaceKind.UTF8_STRING),
        ]

    def parse_benchmark(self, benchmark_uri: str, content: bytes | None) -> bytes:
        if content is None:
            raise UnknownBenchmarkError(
                f"{benchmark_uri}: gcc benchmarks are source files; none was provided"
            )
        return content

    def new_session(self) -> GccSession:
        return GccSession(self)
