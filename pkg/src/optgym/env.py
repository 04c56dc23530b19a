"""The user-facing environment: an MDP over a remote compilation session.

The environment owns episode bookkeeping (action history, cumulative
reward, state digest) while the backend owns program state. Rewards are
computed client-side as the change in a backend cost observation, so a
step with any number of batched actions is always exactly one wire round
trip.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from optgym.datasets import DatasetRegistry, default_registry
from optgym.errors import (
    BackendCrashError,
    BackendUnavailableError,
    CompileError,
    CompileTimeoutError,
    OptGymError,
    OutOfRangeActionError,
    ServiceTimeoutError,
    SessionNotFoundError,
    UnknownSpaceError,
)
from optgym.registry import EnvironmentSpec, RewardSpaceDef
from optgym.service import ServiceHandle
from optgym.spaces import SpaceDescriptor, SpaceKind
from optgym.state import EnvState

# Errors that end the episode instead of propagating, so long-running
# loops survive flaky compilers and killed services.
_EPISODE_ENDING = (
    BackendCrashError,
    ServiceTimeoutError,
    CompileError,
    CompileTimeoutError,
    SessionNotFoundError,
)


@dataclass
class StepReply:
    observations: list
    rewards: list[float]
    done: bool = False
    action_space_changed: bool = False
    info: dict[str, str] = field(default_factory=dict)


class Environment:
    def __init__(
        self,
        spec: EnvironmentSpec,
        handle: ServiceHandle,
        benchmark: str | None = None,
        observation_space: str | None = None,
        reward_space: str | None = None,
        action_space: str | None = None,
        datasets: DatasetRegistry | None = None,
    ):
        self._spec = spec
        self._handle = handle
        self._datasets = datasets or default_registry()
        self._benchmark = benchmark

        spaces = handle.spaces()
        self._action_spaces = {
            d["id"]: SpaceDescriptor.from_dict(d) for d in spaces["action_spaces"]
        }
        self._observation_spaces = {
            d["id"]: SpaceDescriptor.from_dict(d) for d in spaces["observation_spaces"]
        }
        self._action_space_id = (
            action_space or spec.default_action_space or next(iter(self._action_spaces))
        )
        if self._action_space_id not in self._action_spaces:
            raise UnknownSpaceError(self._action_space_id)

        if observation_space is not None and observation_space not in self._observation_spaces:
            raise UnknownSpaceError(f"observation space {observation_space!r}")
        self._default_observation = observation_space

        self._reward_defs = {rd.id: rd for rd in spec.reward_spaces}
        if reward_space is not None and reward_space not in self._reward_defs:
            raise UnknownSpaceError(f"reward space {reward_space!r}")
        self._default_reward = reward_space

        self._session_id: int | None = None
        self._needs_reset = True
        self._actions: list[str] = []
        self._cumulative = 0.0
        self._digest = ""
        self._episode_count = 0
        self._prev_cost: dict[str, float] = {}
        self._scale_denominator: dict[str, float] = {}
        self._closed = False

    # ------------------------------------------------------------------
    @property
    def env_id(self) -> str:
        return self._spec.env_id

    @property
    def benchmark(self) -> str | None:
        return self._benchmark

    @property
    def action_space(self) -> SpaceDescriptor:
        return self._action_spaces[self._action_space_id]

    @property
    def action_names(self) -> list[str]:
        space = self.action_space
        if space.names:
            return list(space.names)
        if space.kind == SpaceKind.DISCRETE:
            return [str(i) for i in range(space.n)]
        return []

    @property
    def observation_spaces(self) -> list[SpaceDescriptor]:
        return list(self._observation_spaces.values())

    @property
    def reward_spaces(self) -> list[SpaceDescriptor]:
        return [rd.descriptor() for rd in self._reward_defs.values()]

    @property
    def reward_space_id(self) -> str | None:
        return self._default_reward

    @property
    def observation_space_id(self) -> str | None:
        return self._default_observation

    @property
    def actions(self) -> list[str]:
        return list(self._actions)

    @property
    def cumulative_reward(self) -> float:
        return self._cumulative

    @property
    def state_digest(self) -> str:
        return self._digest

    @property
    def episode_count(self) -> int:
        return self._episode_count

    @property
    def in_episode(self) -> bool:
        return not self._needs_reset

    @property
    def datasets(self) -> DatasetRegistry:
        return self._datasets

    @property
    def service(self) -> ServiceHandle:
        return self._handle

    # ------------------------------------------------------------------
    def _reset_observation_ids(self) -> list[str]:
        ids = []
        if self._default_observation:
            ids.append(self._default_observation)
        for rd in self._reward_defs.values():
            ids.append(rd.cost_observation)
            if rd.scaled and rd.baseline_observation:
                ids.append(rd.baseline_observation)
        ids.append(self._spec.digest_observation)
        return list(dict.fromkeys(ids))

    def reset(self, benchmark: str | None = None):
        """Start a new episode; returns the default observation, if any."""
        if self._closed:
            raise RuntimeError("environment is closed")
        if benchmark is not None:
            self._benchmark = benchmark
        if self._benchmark is None:
            raise ValueError("no benchmark bound; pass one to reset()")
        self._end_session_quietly()

        content = self._datasets.inline_content(self._benchmark)
        digest = self._datasets.content_digest(self._benchmark)
        obs_ids = self._reset_observation_ids()
        reply = None
        for attempt in range(2):
            try:
                reply = self._handle.client.start_session(
                    self._benchmark,
                    action_space_id=self._action_space_id,
                    observation_space_ids=obs_ids,
                    content=content,
                    content_digest=digest,
                )
                break
            except (BackendCrashError, ServiceTimeoutError):
                if attempt:
                    raise BackendUnavailableError(
                        f"service for {self._spec.backend} did not recover"
                    )
        self._session_id = reply["session_id"]
        values = dict(zip(obs_ids, reply["observations"]))

        self._actions = []
        self._cumulative = 0.0
        self._needs_reset = False
        self._episode_count += 1
        self._digest = values[self._spec.digest_observation]
        self._prev_cost = {}
        self._scale_denominator = {}
        for rd in self._reward_defs.values():
            cost = float(values[rd.cost_observation])
            self._prev_cost[rd.id] = cost
            if rd.scaled and rd.baseline_observation:
                self._scale_denominator[rd.id] = cost - float(values[rd.baseline_observation])
        if self._default_observation:
            return values[self._default_observation]
        return None

    # ------------------------------------------------------------------
    def _normalize_actions(self, actions) -> tuple[list, list[str]]:
        """Returns (wire actions, action names for the history)."""
        space = self.action_space
        if space.kind == SpaceKind.DISCRETE:
            if isinstance(actions, (int, str)):
                actions = [actions]
            wire_actions: list = []
            names: list[str] = []
            catalog = self.action_names
            for a in actions:
                if isinstance(a, str):
                    # "choices:..." names replay vector-set actions recorded
                    # under another action space; the backend validates them.
                    if a not in catalog and not a.startswith("choices:"):
                        raise OutOfRangeActionError(f"unknown action {a!r}")
                    wire_actions.append(a)
                    names.append(a)
                else:
                    if not isinstance(a, int) or not 0 <= a < space.n:
                        raise OutOfRangeActionError(f"action {a!r} not in [0, {space.n})")
                    wire_actions.append(a)
                    names.append(catalog[a])
            return wire_actions, names
        # Choice-vector style spaces: one action is a full vector of ints.
        if isinstance(actions, str):
            actions = [actions]
        elif actions and all(isinstance(a, int) for a in actions):
            actions = [list(actions)]
        wire_actions = []
        names = []
        for a in actions:
            if isinstance(a, str):
                wire_actions.append(a)
                names.append(a)
            else:
                vec = [int(x) for x in a]
                wire_actions.append(vec)
                names.append("choices:" + ",".join(str(x) for x in vec))
        return wire_actions, names

    def step(
        self,
        actions,
        observation_spaces: list[str] | None = None,
        reward_spaces: list[str] | None = None,
    ) -> StepReply:
        """Apply a batch of actions in one round trip.

        When multiple actions are batched only the final state's
        observations and rewards come back. An empty action list is the
        observation-only probe: no state change.
        """
        if self._needs_reset:
            raise RuntimeError("call reset() before step()")
        wire_actions, names = self._normalize_actions(actions)

        if observation_spaces is None:
            user_obs = [self._default_observation] if self._default_observation else []
        else:
            user_obs = list(observation_spaces)
        for space_id in user_obs:
            if space_id not in self._observation_spaces:
                raise UnknownSpaceError(f"observation space {space_id!r}")

        if reward_spaces is None:
            requested_rewards = [self._default_reward] if self._default_reward else []
        else:
            requested_rewards = list(reward_spaces)
        reward_defs: list[RewardSpaceDef] = []
        for rid in requested_rewards:
            rd = self._reward_defs.get(rid)
            if rd is None:
                raise UnknownSpaceError(f"reward space {rid!r}")
            reward_defs.append(rd)

        accrue = self._reward_defs.get(self._default_reward) if self._default_reward else None
        cost_ids = [rd.cost_observation for rd in reward_defs]
        if accrue is not None:
            cost_ids.append(accrue.cost_observation)
        request_ids = list(dict.fromkeys(user_obs + cost_ids + [self._spec.digest_observation]))

        try:
            reply = self._handle.client.step(self._session_id, wire_actions, request_ids)
        except _EPISODE_ENDING as e:
            self._needs_reset = True
            return StepReply(
                observations=[None] * len(user_obs),
                rewards=[0.0] * len(requested_rewards),
                done=True,
                info={"error": e.code, "detail": e.message},
            )

        values = dict(zip(request_ids, reply["observations"]))
        self._actions.extend(names)
        self._digest = values[self._spec.digest_observation]

        rewards: list[float] = []
        new_costs: dict[str, float] = {}
        for rd in reward_defs:
            new_costs[rd.id] = float(values[rd.cost_observation])
            rewards.append(self._reward_value(rd, new_costs[rd.id]))
        if accrue is not None:
            cost = float(values[accrue.cost_observation])
            if accrue.id in new_costs:
                # already computed above; accrue the same value
                idx = [rd.id for rd in reward_defs].index(accrue.id)
                self._cumulative += rewards[idx]
            else:
                self._cumulative += self._reward_value(accrue, cost)
            self._prev_cost[accrue.id] = cost
        for rd in reward_defs:
            self._prev_cost[rd.id] = new_costs[rd.id]

        done = bool(reply.get("done", False))
        if done:
            self._needs_reset = True
        return StepReply(
            observations=[values[i] for i in user_obs],
            rewards=rewards,
            done=done,
            action_space_changed=bool(reply.get("action_space_changed", False)),
        )

    def _reward_value(self, rd: RewardSpaceDef, new_cost: float) -> float:
        raw = self._prev_cost[rd.id] - new_cost
        if rd.scaled:
            denominator = self._scale_denominator.get(rd.id, 0.0)
            if denominator:
                return raw / denominator
        return raw

    def observe(self, space_ids: list[str] | str) -> list:
        """Fetch observations without changing state (an empty-action step)."""
        single = isinstance(space_ids, str)
        ids = [space_ids] if single else list(space_ids)
        reply = self.step([], observation_spaces=ids, reward_spaces=[])
        return reply.observations[0] if single else reply.observations

    # ------------------------------------------------------------------
    def fork(self) -> "Environment":
        """An independent deep copy of the current episode state."""
        if self._needs_reset:
            raise RuntimeError("fork requires a reset environment")
        child_session = self._handle.client.fork(self._session_id)
        child = Environment(
            self._spec,
            self._handle.acquire(),
            benchmark=self._benchmark,
            observation_space=self._default_observation,
            reward_space=self._default_reward,
            action_space=self._action_space_id,
            datasets=self._datasets,
        )
        child._session_id = child_session
        child._needs_reset = False
        child._actions = list(self._actions)
        child._cumulative = self._cumulative
        child._digest = self._digest
        child._episode_count = self._episode_count
        child._prev_cost = dict(self._prev_cost)
        child._scale_denominator = dict(self._scale_denominator)
        return child

    def serialize_state(self) -> EnvState:
        return EnvState(
            env_id=self._spec.env_id,
            benchmark=self._benchmark or "",
            reward_space_id=self._default_reward or "",
            actions=list(self._actions),
            cumulative_reward=self._cumulative,
            state_digest=self._digest,
        )

    # ------------------------------------------------------------------
    def _end_session_quietly(self) -> None:
        if self._session_id is not None:
            try:
                self._handle.client.end_session(self._session_id)
            except OptGymError:
                pass
            self._session_id = None

    def close(self) -> None:
        if self._closed:
            return
        self._end_session_quietly()
        self._handle.release()
        self._closed = True

    def __enter__(self) -> "Environment":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
