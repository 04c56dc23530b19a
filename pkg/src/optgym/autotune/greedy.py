"""Greedy search: try every action in a fork, commit the best, repeat."""

from __future__ import annotations

from optgym.autotune import BudgetTracker, SearchBudget, SearchResult
from optgym.errors import BudgetInvalidError
from optgym.spaces import SpaceKind


def greedy_search(env, budget: SearchBudget) -> SearchResult:
    """Each round forks once per action and commits the argmax reward.

    Terminates when no action yields a positive reward (ties break toward
    the lowest action index) or the budget runs out.
    """
    if env.action_space.kind != SpaceKind.DISCRETE:
        raise BudgetInvalidError("greedy search needs a discrete action space")
    if env.reward_space_id is None:
        raise BudgetInvalidError("greedy search needs a default reward space")
    tracker = BudgetTracker(budget)
    n = env.action_space.n
    if not env.in_episode:
        env.reset()

    rounds = 0
    while not tracker.exhausted():
        best_action = None
        best_reward = 0.0
        for action in range(n):
            fork = env.fork()
            try:
                reply = fork.step([action])
                tracker.count()
                if not reply.done and reply.rewards[0] > best_reward:
                    best_reward = reply.rewards[0]
                    best_action = action
            finally:
                fork.close()
            if tracker.exhausted():
                break
        if best_action is None:
            break
        env.step([best_action])
        tracker.count()
        rounds += 1
    state = env.serialize_state()
    return SearchResult(
        technique="greedy",
        benchmark=state.benchmark,
        best_state=state,
        best_metric=env.cumulative_reward,
        evaluations=tracker.evaluations,
        wall_seconds=tracker.wall_seconds,
        seed=0,
        extras={"rounds": rounds},
    )
