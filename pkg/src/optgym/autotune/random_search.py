"""Random search: pass-walk mode for discrete spaces, i.i.d. vector mode."""

from __future__ import annotations

import random

from optgym.autotune import BudgetTracker, SearchBudget, SearchResult
from optgym.autotune.problems import VectorProblem
from optgym.errors import BudgetInvalidError
from optgym.spaces import SpaceKind


def random_search(env_or_problem, budget: SearchBudget, seed: int = 0) -> SearchResult:
    if isinstance(env_or_problem, VectorProblem):
        return _vector_mode(env_or_problem, budget, seed)
    return _walk_mode(env_or_problem, budget, seed)


def _walk_mode(env, budget: SearchBudget, seed: int) -> SearchResult:
    """Take random single actions; restart the episode when patience runs out."""
    if env.reward_space_id is None:
        raise BudgetInvalidError("random search needs a default reward space")
    if budget.patience is None and budget.max_compilations is None and budget.wall_seconds is None:
        raise BudgetInvalidError("unbounded search")
    rng = random.Random(seed)
    tracker = BudgetTracker(budget)
    n = env.action_space.n

    env.reset()
    best_reward = env.cumulative_reward
    best_state = env.serialize_state()
    streak = 0
    while not tracker.exhausted():
        reply = env.step([rng.randrange(n)])
        tracker.count()
        if reply.done:
            env.reset()
            streak = 0
            continue
        streak = 0 if reply.rewards[0] > 0 else streak + 1
        if env.cumulative_reward > best_reward:
            best_reward = env.cumulative_reward
            best_state = env.serialize_state()
        if budget.patience is not None and streak >= budget.patience:
            env.reset()
            streak = 0
    return SearchResult(
        technique="random",
        benchmark=best_state.benchmark,
        best_state=best_state,
        best_metric=best_reward,
        evaluations=tracker.evaluations,
        wall_seconds=tracker.wall_seconds,
        seed=seed,
        extras={"mode": "walk"},
    )


def _vector_mode(problem: VectorProblem, budget: SearchBudget, seed: int) -> SearchResult:
    """Sample one full choice vector per evaluation, uniform per option."""
    if budget.max_compilations is None and budget.wall_seconds is None:
        raise BudgetInvalidError("vector-mode random search needs an evaluation or wall bound")
    rng = random.Random(seed)
    tracker = BudgetTracker(budget)
    cards = problem.cardinalities

    best_size = float("inf")
    best_vector: list[int] | None = None
    pending = [list(v) for v in problem.initial_candidates()]
    while not tracker.exhausted():
        vector = pending.pop(0) if pending else [rng.randrange(c) for c in cards]
        size = problem.evaluate(vector)
        tracker.count()
        if size < best_size:
            best_size = size
            best_vector = vector
    assert best_vector is not None
    return SearchResult(
        technique="random",
        benchmark=problem.benchmark,
        best_state=problem.state_for(best_vector),
        best_metric=best_size,
        evaluations=tracker.evaluations,
        wall_seconds=tracker.wall_seconds,
        seed=seed,
        extras={"mode": "vector", "best_vector": best_vector},
    )


def is_discrete_env(env) -> bool:
    return env.action_space.kind == SpaceKind.DISCRETE
