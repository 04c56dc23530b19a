"""Environment wrappers that mutate the MDP formulation.

Wrappers compose in application order and stay transparent to state
serialization: the wrapped environment records plain backend action
names, so any serialized state replays on a bare environment.
"""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

from optgym.env import Environment, StepReply
from optgym.errors import InvalidWrapperConfigError, OutOfRangeActionError
from optgym.spaces import SpaceDescriptor, SpaceKind


class EnvironmentWrapper:
    """Delegating base; subclasses override the pieces they change."""

    def __init__(self, env):
        self.env = env

    def __getattr__(self, name):
        return getattr(self.env, name)

    def reset(self, benchmark: str | None = None):
        return self.env.reset(benchmark)

    def step(self, actions, observation_spaces=None, reward_spaces=None) -> StepReply:
        return self.env.step(actions, observation_spaces, reward_spaces)

    def observe(self, space_ids):
        single = isinstance(space_ids, str)
        ids = [space_ids] if single else list(space_ids)
        reply = self.step([], observation_spaces=ids, reward_spaces=[])
        return reply.observations[0] if single else reply.observations

    def fork(self):
        return self._rewrap(self.env.fork())

    def _rewrap(self, inner):
        raise NotImplementedError

    def close(self) -> None:
        self.env.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class TimeLimit(EnvironmentWrapper):
    """Force done=True once ``max_steps`` actions have been applied.

    ``max_steps=None`` is the neutral configuration: fully transparent.
    """

    def __init__(self, env, max_steps: int | None):
        super().__init__(env)
        if max_steps is not None and max_steps < 1:
            raise InvalidWrapperConfigError("TimeLimit needs max_steps >= 1")
        self.max_steps = max_steps
        self._elapsed = 0
        self._done = False

    def reset(self, benchmark: str | None = None):
        self._elapsed = 0
        self._done = False
        return self.env.reset(benchmark)

    def step(self, actions, observation_spaces=None, reward_spaces=None) -> StepReply:
        if self._done:
            raise RuntimeError("episode hit its step limit; call reset()")
        reply = self.env.step(actions, observation_spaces, reward_spaces)
        if isinstance(actions, (int, str)):
            applied = 1
        else:
            applied = len(actions)
        self._elapsed += applied
        if self.max_steps is not None and self._elapsed >= self.max_steps and applied:
            reply.done = True
        if reply.done:
            self._done = True
        return reply

    def _rewrap(self, inner):
        wrapped = TimeLimit(inner, self.max_steps)
        wrapped._elapsed = self._elapsed
        wrapped._done = self._done
        return wrapped


class CycleOverBenchmarks(EnvironmentWrapper):
    """Each reset advances to the next benchmark, wrapping around."""

    def __init__(self, env, benchmarks: Sequence[str]):
        super().__init__(env)
        benchmarks = list(benchmarks)
        if not benchmarks:
            raise InvalidWrapperConfigError("CycleOverBenchmarks needs a non-empty list")
        self.benchmarks = benchmarks
        self._cycle = itertools.cycle(benchmarks)

    def reset(self, benchmark: str | None = None):
        if benchmark is None:
            benchmark = next(self._cycle)
        return self.env.reset(benchmark)

    def _rewrap(self, inner):
        return CycleOverBenchmarks(inner, self.benchmarks)


class ActionSubset(EnvironmentWrapper):
    """Renumber the discrete action space down to a subset of indices."""

    def __init__(self, env, indices: Sequence[int]):
        super().__init__(env)
        inner_space = env.action_space
        if inner_space.kind != SpaceKind.DISCRETE:
            raise InvalidWrapperConfigError("ActionSubset requires a discrete action space")
        indices = list(indices)
        if not indices or len(set(indices)) != len(indices):
            raise InvalidWrapperConfigError("indices must be non-empty and unique")
        if any(not 0 <= i < inner_space.n for i in indices):
            raise InvalidWrapperConfigError("indices out of range")
        self.indices = indices
        inner_names = env.action_names
        self._names = [inner_names[i] for i in indices]

    @property
    def action_space(self) -> SpaceDescriptor:
        return SpaceDescriptor(
            id=self.env.action_space.id,
            kind=SpaceKind.DISCRETE,
            display_name=f"{self.env.action_space.display_name} (subset)",
            n=len(self.indices),
            names=self._names,
        )

    @property
    def action_names(self) -> list[str]:
        return list(self._names)

    def _translate(self, action):
        if isinstance(action, str):
            if action not in self._names:
                raise OutOfRangeActionError(f"action {action!r} not in subset")
            return action
        if not isinstance(action, int) or not 0 <= action < len(self.indices):
            raise OutOfRangeActionError(f"action {action!r} not in [0, {len(self.indices)})")
        return self.indices[action]

    def step(self, actions, observation_spaces=None, reward_spaces=None) -> StepReply:
        if isinstance(actions, (int, str)):
            actions = [actions]
        return self.env.step(
            [self._translate(a) for a in actions], observation_spaces, reward_spaces
        )

    def _rewrap(self, inner):
        return ActionSubset(inner, self.indices)


class DerivedObservation(EnvironmentWrapper):
    """Expose a client-side observation computed from backend spaces.

    ``fn(source_values, env)`` receives the source observations (in
    ``sources`` order) plus the environment, so derived spaces can fold
    in episode state such as the action history.
    """

    def __init__(
        self,
        env,
        space_id: str,
        sources: Sequence[str],
        fn: Callable[[list, "Environment"], object],
        as_default: bool = False,
    ):
        super().__init__(env)
        if not space_id or not sources:
            raise InvalidWrapperConfigError("derived space needs an id and source spaces")
        known = {d.id for d in env.observation_spaces}
        missing = [s for s in sources if s not in known]
        if missing:
            raise InvalidWrapperConfigError(f"unknown source spaces {missing}")
        if space_id in known:
            raise InvalidWrapperConfigError(f"space id {space_id!r} already exists")
        self.space_id = space_id
        self.sources = list(sources)
        self.fn = fn
        self.as_default = as_default

    @property
    def observation_spaces(self) -> list[SpaceDescriptor]:
        derived = SpaceDescriptor(id=self.space_id, kind=SpaceKind.COMPOSITE, parts=[
            d for d in self.env.observation_spaces if d.id in self.sources
        ])
        return list(self.env.observation_spaces) + [derived]

    def reset(self, benchmark: str | None = None):
        value = self.env.reset(benchmark)
        if self.as_default:
            return self.observe(self.space_id)
        return value

    def step(self, actions, observation_spaces=None, reward_spaces=None) -> StepReply:
        if observation_spaces is None:
            observation_spaces = [self.space_id] if self.as_default else None
        if observation_spaces is None or self.space_id not in observation_spaces:
            return self.env.step(actions, observation_spaces, reward_spaces)
        requested = list(observation_spaces)
        passthrough = [s for s in requested if s != self.space_id]
        wire_ids = list(dict.fromkeys(passthrough + self.sources))
        reply = self.env.step(actions, wire_ids, reward_spaces)
        values = dict(zip(wire_ids, reply.observations))
        derived = self.fn([values[s] for s in self.sources], self.env)
        reply.observations = [
            derived if s == self.space_id else values[s] for s in requested
        ]
        return reply

    def _rewrap(self, inner):
        return DerivedObservation(inner, self.space_id, self.sources, self.fn, self.as_default)


def action_histogram(env) -> list[int]:
    """Counts of each action taken this episode, in action-space order."""
    names = env.action_names
    index = {name: i for i, name in enumerate(names)}
    counts = [0] * len(names)
    for name in env.actions:
        if name in index:
            counts[index[name]] += 1
    return counts


def with_action_histogram(env, base_space_id: str) -> DerivedObservation:
    """Feature vector concatenated with a histogram of past actions."""

    def fn(values, inner_env):
        base = values[0]
        base = list(base) if isinstance(base, (list, tuple)) else [base]
        return base + action_histogram(inner_env)

    return DerivedObservation(
        env, f"{base_space_id}+ActionHistogram", [base_space_id], fn, as_default=True
    )
