"""Hill climbing with strictly-better acceptance.

Vector spaces mutate a handful of single-option choices per step. For
discrete environments (whose space is a sequence, not a fixed vector)
the climber mutates a bounded-length action sequence instead.
"""

from __future__ import annotations

import random

from optgym.autotune import BudgetTracker, SearchBudget, SearchResult
from optgym.autotune.problems import VectorProblem
from optgym.errors import BudgetInvalidError

MAX_SEQUENCE_LENGTH = 64


def hill_climb(
    env_or_problem, budget: SearchBudget, seed: int = 0, neighborhood_size: int = 5
) -> SearchResult:
    if neighborhood_size < 1:
        raise BudgetInvalidError("neighborhood_size must be >= 1")
    if isinstance(env_or_problem, VectorProblem):
        return _vector_mode(env_or_problem, budget, seed, neighborhood_size)
    return _sequence_mode(env_or_problem, budget, seed, neighborhood_size)


def _vector_mode(
    problem: VectorProblem, budget: SearchBudget, seed: int, neighborhood_size: int
) -> SearchResult:
    rng = random.Random(seed)
    tracker = BudgetTracker(budget)
    cards = problem.cardinalities

    current = [0] * len(cards)
    current_size = problem.evaluate(current)
    tracker.count()
    trace = [current_size]
    while not tracker.exhausted():
        candidate = list(current)
        for _ in range(neighborhood_size):
            i = rng.randrange(len(cards))
            candidate[i] = rng.randrange(cards[i])
        size = problem.evaluate(candidate)
        tracker.count()
        if size < current_size:  # plateau counts as rejection
            current, current_size = candidate, size
            trace.append(size)
    return SearchResult(
        technique="hillclimb",
        benchmark=problem.benchmark,
        best_state=problem.state_for(current),
        best_metric=current_size,
        evaluations=tracker.evaluations,
        wall_seconds=tracker.wall_seconds,
        seed=seed,
        extras={"mode": "vector", "accepted_trace": trace, "best_vector": current},
    )


def _mutate_sequence(rng: random.Random, sequence: list[int], n_actions: int, edits: int) -> list[int]:
    out = list(sequence)
    for _ in range(edits):
        kind = rng.randrange(3)
        if kind == 0 and len(out) < MAX_SEQUENCE_LENGTH:  # insert
            out.insert(rng.randrange(len(out) + 1), rng.randrange(n_actions))
        elif kind == 1 and out:  # delete
            out.pop(rng.randrange(len(out)))
        elif out:  # replace
            out[rng.randrange(len(out))] = rng.randrange(n_actions)
        else:
            out.append(rng.randrange(n_actions))
    return out


def _sequence_mode(env, budget: SearchBudget, seed: int, neighborhood_size: int) -> SearchResult:
    if env.reward_space_id is None:
        raise BudgetInvalidError("hill climbing needs a default reward space")
    rng = random.Random(seed)
    tracker = BudgetTracker(budget)
    n = env.action_space.n

    def evaluate(sequence: list[int]) -> float:
        env.reset()
        if sequence:
            reply = env.step(sequence)
            if reply.done and "error" in reply.info:
                return float("-inf")
        return env.cumulative_reward

    current: list[int] = []
    current_reward = evaluate(current)
    tracker.count()
    best_state = env.serialize_state()
    while not tracker.exhausted():
        candidate = _mutate_sequence(rng, current, n, neighborhood_size)
        reward = evaluate(candidate)
        tracker.count()
        if reward > current_reward:
            current, current_reward = candidate, reward
            best_state = env.serialize_state()
    return SearchResult(
        technique="hillclimb",
        benchmark=best_state.benchmark,
        best_state=best_state,
        best_metric=current_reward,
        evaluations=tracker.evaluations,
        wall_seconds=tracker.wall_seconds,
        seed=seed,
        extras={"mode": "sequence"},
    )
