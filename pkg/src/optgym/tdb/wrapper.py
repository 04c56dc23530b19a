"""Environment wrapper that logs every step into a TransitionStore.

The logged observations piggyback on the step's own wire round trip, so
the only per-step overhead is the enqueue. Rows are keyed exactly like
replay states (benchmark, action names, state digest), which is what
makes offline deduplication sound.
"""

from __future__ import annotations

from optgym.env import StepReply
from optgym.wrappers import EnvironmentWrapper

# Per-environment sources for the three observation columns:
# (instruction count, histogram vector, program text).
OBSERVATION_SOURCES = {
    "tinyir-v0": ("InstCount", "OpcodeHistogram", "Ir"),
    # gcc has no IR text; the choice vector doubles as the histogram and
    # the state digest stands in for the program text.
    "gcc-v0": ("obj_size", "choices", "StateDigest"),
}


class TransitionLogger(EnvironmentWrapper):
    def __init__(self, env, store, sources: tuple[str, str, str] | None = None):
        super().__init__(env)
        self.store = store
        self.sources = sources or OBSERVATION_SOURCES.get(
            env.env_id, ("InstCount", "OpcodeHistogram", "Ir")
        )

    def _log(self, values: dict) -> None:
        instcount = values[self.sources[0]]
        histogram = values[self.sources[1]]
        if not isinstance(histogram, (list, tuple)):
            histogram = [histogram]
        self.store.record_step(self.env.benchmark, self.env.actions, self.env.state_digest)
        self.store.record_observation(
            self.env.state_digest, int(instcount), list(histogram), str(values[self.sources[2]])
        )

    def reset(self, benchmark: str | None = None):
        value = self.env.reset(benchmark)
        values = dict(zip(self.sources, self.env.observe(list(self.sources))))
        self._log(values)
        return value

    def step(self, actions, observation_spaces=None, reward_spaces=None) -> StepReply:
        if observation_spaces is None:
            default = self.env.observation_space_id
            user_obs = [default] if default else []
        else:
            user_obs = list(observation_spaces)
        merged = list(dict.fromkeys(user_obs + list(self.sources)))
        reply = self.env.step(actions, merged, reward_spaces)
        if not (reply.done and "error" in reply.info):
            values = dict(zip(merged, reply.observations))
            self._log(values)
            reply.observations = [values[s] for s in user_obs]
        else:
            reply.observations = reply.observations[: len(user_obs)]
        return reply

    def flush(self) -> None:
        self.store.flush()

    def _rewrap(self, inner):
        return TransitionLogger(inner, self.store, self.sources)
