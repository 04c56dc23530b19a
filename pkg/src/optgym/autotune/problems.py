"""Bounded integer choice-vector problems for vector-mode techniques.

A VectorProblem is anything with per-option ``cardinalities``, an
``evaluate(vector) -> float`` objective (lower is better), and a
``state_for(vector) -> EnvState`` snapshot for persistence.
"""

from __future__ import annotations

from typing import Protocol, runtime_checkable

from optgym.state import EnvState


@runtime_checkable
class VectorProblem(Protocol):
    cardinalities: list[int]
    benchmark: str

    def evaluate(self, vector: list[int]) -> float: ...

    def state_for(self, vector: list[int]) -> EnvState: ...

    def initial_candidates(self) -> list[list[int]]: ...


class EnvChoiceVectorProblem:
    """Adapts an environment with a choice-vector action space.

    One evaluation is one episode: reset, apply the vector, observe the
    cost metric. ``seed_vectors`` are evaluated before any sampling so
    known-good configurations (like the compiler's -Os) always join the
    candidate set.
    """

    def __init__(self, env, cost_observation: str, seed_vectors: list[list[int]] | None = None):
        from optgym.spaces import SpaceKind

        space = env.action_space
        if space.kind != SpaceKind.INTEGER_BOX:
            raise TypeError(f"action space {space.id!r} is not a choice-vector space")
        self.env = env
        self.cost_observation = cost_observation
        self.cardinalities = [hi + 1 for hi in space.upper]
        self.benchmark = env.benchmark or ""
        self._seed_vectors = [list(v) for v in (seed_vectors or [])]

    def initial_candidates(self) -> list[list[int]]:
        return [list(v) for v in self._seed_vectors]

    def evaluate(self, vector: list[int]) -> float:
        self.env.reset()
        reply = self.env.step(
            [list(vector)], observation_spaces=[self.cost_observation], reward_spaces=[]
        )
        if reply.done and "error" in reply.info:
            return float("inf")  # failed compile: worst possible objective
        return float(reply.observations[0])

    def state_for(self, vector: list[int]) -> EnvState:
        self.env.reset()
        self.env.step([list(vector)], observation_spaces=[], reward_spaces=[])
        return self.env.serialize_state()


class SyntheticVectorProblem:
    """In-memory objective for tests and fixture-backed experiments."""

    def __init__(self, cardinalities: list[int], fn, benchmark: str = "benchmark://toy-v0/fn"):
        self.cardinalities = list(cardinalities)
        self._fn = fn
        self.benchmark = benchmark

    def initial_candidates(self) -> list[list[int]]:
        return []

    def evaluate(self, vector: list[int]) -> float:
        return float(self._fn(list(vector)))

    def state_for(self, vector: list[int]) -> EnvState:
        return EnvState(
            env_id="synthetic",
            benchmark=self.benchmark,
            reward_space_id="",
            actions=["choices:" + ",".join(str(x) for x in vector)],
            cumulative_reward=0.0,
            state_digest="",
        )
