"""Compiler optimization tasks as interactive MDP environments."""

from __future__ import annotations

from optgym.datasets import DatasetRegistry, default_registry
from optgym.env import Environment, StepReply
from optgym.errors import DigestMismatchError, OptGymError
from optgym.registry import EnvironmentSpec, environment_ids, environment_spec, register_environment
from optgym.service import ServiceConfig, start_service
from optgym.state import EnvState

__version__ = "0.1.0"

__all__ = [
    "DatasetRegistry",
    "EnvState",
    "Environment",
    "EnvironmentSpec",
    "OptGymError",
    "ServiceConfig",
    "StepReply",
    "environment_ids",
    "environment_spec",
    "make",
    "register_environment",
    "restore_state",
]


def make(
    env_spec: str,
    benchmark: str | None = None,
    observation_space: str | None = None,
    reward_space: str | None = None,
    action_space: str | None = None,
    service_config: ServiceConfig | None = None,
    datasets: DatasetRegistry | None = None,
    **kwargs,
) -> Environment:
    """Create an un-reset environment bound to a backend service.

    ``env_spec`` names a registered environment ("tinyir-v0", "gcc-v0").
    Backend-specific options (like ``compiler=`` for gcc) pass through as
    keyword arguments.
    """
    spec = environment_spec(env_spec)
    options = spec.backend_options(kwargs)
    if kwargs:
        raise TypeError(f"unexpected keyword arguments: {sorted(kwargs)}")
    handle = start_service(spec.backend, config=service_config, options=options)
    try:
        return Environment(
            spec,
            handle,
            benchmark=benchmark,
            observation_space=observation_space,
            reward_space=reward_space,
            action_space=action_space,
            datasets=datasets,
        )
    except Exception:
        handle.release()
        raise


def restore_state(
    state: EnvState,
    datasets: DatasetRegistry | None = None,
    service_config: ServiceConfig | None = None,
    **kwargs,
) -> Environment:
    """Rebuild an environment by replaying a serialized state.

    The recorded digest is verified after replay; a mismatch raises
    DigestMismatchError rather than silently accepting a divergent state.
    """
    env = make(
        state.env_id,
        state.benchmark,
        reward_space=state.reward_space_id or None,
        datasets=datasets,
        service_config=service_config,
        **kwargs,
    )
    try:
        env.reset()
        if state.actions:
            reply = env.step(list(state.actions))
            if reply.done and "error" in reply.info:
                raise DigestMismatchError(f"replay failed: {reply.info['error']}")
        if env.state_digest != state.state_digest:
            raise DigestMismatchError(
                f"replay digest {env.state_digest} != recorded {state.state_digest}"
            )
        rd = environment_spec(state.env_id).reward_def(state.reward_space_id)
        if rd is not None and rd.deterministic:
            if abs(env.cumulative_reward - state.cumulative_reward) > 1e-9:
                raise DigestMismatchError(
                    f"replay reward {env.cumulative_reward!r} != "
                    f"recorded {state.cumulative_reward!r}"
                )
    except Exception:
        env.close()
        raise
    return env
