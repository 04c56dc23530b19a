"""tinyir as a compilation service backend."""

from __future__ import annotations

from optgym.errors import OutOfRangeActionError, UnknownBenchmarkError
from optgym.service.session import Backend, CompilationSession
from optgym.spaces import SpaceDescriptor, SpaceKind
from optgym.tinyir.generate import generate, generate_stress
from optgym.tinyir.ir import Program, parse_program, program_digest
from optgym.tinyir.observation import HISTOGRAM_BINS, observation
from optgym.tinyir.passes import PASS_NAMES, run_pass
from optgym.tinyir.suite import load_suite_program

ACTION_SPACE = SpaceDescriptor(
    id="passes",
    kind=SpaceKind.DISCRETE,
    display_name="optimization passes",
    n=len(PASS_NAMES),
    names=list(PASS_NAMES),
)

OBSERVATION_SPACES = [
    SpaceDescriptor(id="InstCount", kind=SpaceKind.SCALAR_RANGE, lo=0.0, hi=None),
    SpaceDescriptor(id="OpcodeHistogram", kind=SpaceKind.INT64_VECTOR, length=len(HISTOGRAM_BINS)),
    SpaceDescriptor(id="Ir", kind=SpaceKind.UTF8_STRING),
    SpaceDescriptor(id="BaselineInstCount", kind=SpaceKind.SCALAR_RANGE, lo=0.0, hi=None),
    SpaceDescriptor(id="StateDigest", kind=SpaceKind.UTF8_STRING),
]


def _parse_seed(path: str, prefix: str = "seed-") -> int:
    if not path.startswith(prefix) or not path[len(prefix) :].isdigit():
        raise UnknownBenchmarkError(f"bad generator benchmark path {path!r}")
    seed = int(path[len(prefix) :])
    if seed >= 2**32:
        raise UnknownBenchmarkError(f"seed {seed} exceeds 32 bits")
    return seed


class TinyIrSession(CompilationSession):
    def __init__(self, backend: "TinyIrBackend"):
        self._backend = backend
        self._program: Program | None = None
        self._benchmark = ""

    def get_action_spaces(self):
        return [ACTION_SPACE]

    def get_observation_spaces(self):
        return list(OBSERVATION_SPACES)

    def init(self, action_space_id: str, benchmark_uri: str, artifact: Program) -> None:
        self._benchmark = benchmark_uri
        self._program = artifact

    def apply_action(self, action) -> tuple[bool, bool]:
        if isinstance(action, str):
            if action not in PASS_NAMES:
                raise OutOfRangeActionError(f"unknown pass {action!r}")
            pass_id = action
        else:
            if not isinstance(action, int) or not 0 <= action < len(PASS_NAMES):
                raise OutOfRangeActionError(f"action {action!r} not in [0, {len(PASS_NAMES)})")
            pass_id = PASS_NAMES[action]
        self._program = run_pass(self._program, pass_id)
        return False, False

    def set_observation(self, observation_space_id: str):
        if observation_space_id == "StateDigest":
            return program_digest(self._program)
        return observation(self._program, observation_space_id)

    def fork(self) -> "TinyIrSession":
        child = TinyIrSession(self._backend)
        child._benchmark = self._benchmark
        child._program = self._program  # immutable; passes replace, never mutate
        return child


class TinyIrBackend(Backend):
    name = "tinyir"

    def action_spaces(self):
        return [ACTION_SPACE]

    def observation_spaces(self):
        return list(OBSERVATION_SPACES)

    def parse_benchmark(self, benchmark_uri: str, content: bytes | None) -> Program:
        if content is not None:
            return parse_program(content.decode("utf-8"))
        if benchmark_uri.startswith("benchmark://tinyir-gen-v0/"):
            return generate(_parse_seed(benchmark_uri.rsplit("/", 1)[1]))
        if benchmark_uri.startswith("benchmark://tinyir-stress-v0/"):
            return generate_stress(_parse_seed(benchmark_uri.rsplit("/", 1)[1]))
        if benchmark_uri.startswith("benchmark://tinyir-suite-v0/"):
            return load_suite_program(benchmark_uri.rsplit("/", 1)[1])
        raise UnknownBenchmarkError(benchmark_uri)

    def new_session(self) -> TinyIrSession:
        return TinyIrSession(self)
