"""Registered environments and their reward-space definitions.

Reward spaces are a frontend concept: each is the per-step change in a
cost observation computed by the backend, optionally scaled by the gain
the default pipeline achieves on the initial program.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from optgym.errors import UnknownEnvironmentError
from optgym.spaces import SpaceDescriptor, SpaceKind


@dataclass(frozen=True)
class RewardSpaceDef:
    id: str
    cost_observation: str
    scaled: bool = False
    baseline_observation: str | None = None
    deterministic: bool = True
    platform_dependent: bool = False

    def descriptor(self) -> SpaceDescriptor:
        return SpaceDescriptor(
            id=self.id,
            kind=SpaceKind.SCALAR_RANGE,
            lo=None,
            hi=None,
            deterministic=self.deterministic,
            platform_dependent=self.platform_dependent,
        )


@dataclass
class EnvironmentSpec:
    env_id: str
    backend: str
    reward_spaces: list[RewardSpaceDef]
    default_action_space: str = ""
    digest_observation: str = "StateDigest"
    cost_metric: str = ""  # the headline size metric shown in UIs
    dataset_names: tuple[str, ...] = ()
    option_keys: tuple[str, ...] = field(default_factory=tuple)

    def reward_def(self, reward_space_id: str) -> RewardSpaceDef | None:
        for rd in self.reward_spaces:
            if rd.id == reward_space_id:
                return rd
        return None

    def backend_options(self, kwargs: dict) -> dict[str, str]:
        options = {}
        for key in self.option_keys:
            value = kwargs.pop(key, None)
            if value is None and key == "compiler":
                value = os.environ.get("OPTGYM_GCC", "gcc")
            if value is not None:
                options[key] = str(value)
        return options


_SPECS: dict[str, EnvironmentSpec] = {}


def register_environment(spec: EnvironmentSpec) -> None:
    _SPECS[spec.env_id] = spec


def environment_spec(env_id: str) -> EnvironmentSpec:
    try:
        return _SPECS[env_id]
    except KeyError:
        raise UnknownEnvironmentError(env_id)


def environment_ids() -> list[str]:
    return sorted(_SPECS)


register_environment(
    EnvironmentSpec(
        env_id="tinyir-v0",
        backend="tinyir",
        reward_spaces=[
            RewardSpaceDef("InstructionCount", cost_observation="InstCount"),
            RewardSpaceDef(
                "InstructionCountScaled",
                cost_observation="InstCount",
                scaled=True,
                baseline_observation="BaselineInstCount",
            ),
        ],
        default_action_space="passes",
        cost_metric="InstCount",
        dataset_names=("tinyir-gen-v0", "tinyir-stress-v0", "tinyir-suite-v0", "user-v0"),
    )
)

register_environment(
    EnvironmentSpec(
        env_id="gcc-v0",
        backend="gcc",
        reward_spaces=[
            RewardSpaceDef("obj_size", cost_observation="obj_size", platform_dependent=True),
            RewardSpaceDef("asm_size", cost_observation="asm_size", platform_dependent=True),
        ],
        default_action_space="categorical",
        cost_metric="obj_size",
        dataset_names=("user-v0",),
        option_keys=("compiler",),
    )
)
