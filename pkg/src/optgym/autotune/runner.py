"""Search orchestration: run techniques on benchmarks, record cost context.

The runner decorates raw SearchResults with the initial, final, and
baseline costs that suite-level reporting needs, and fans searches out
across benchmarks (one environment per worker; techniques themselves stay
single-threaded).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import optgym
from optgym.autotune import SearchBudget, SearchResult, save_result
from optgym.autotune.genetic import genetic_algorithm
from optgym.autotune.greedy import greedy_search
from optgym.autotune.hill_climb import hill_climb
from optgym.autotune.problems import EnvChoiceVectorProblem
from optgym.autotune.random_search import random_search

TECHNIQUES = ("random", "greedy", "hillclimb", "ga")


def _tinyir_search(env, technique: str, budget: SearchBudget, seed: int, **kwargs) -> SearchResult:
    env.reset()
    initial, baseline = env.observe(["InstCount", "BaselineInstCount"])
    if technique == "random":
        result = random_search(env, budget, seed)
    elif technique == "greedy":
        result = greedy_search(env, budget)
    elif technique == "hillclimb":
        result = hill_climb(env, budget, seed, **kwargs)
    else:
        raise ValueError(f"technique {technique!r} does not apply to a discrete action space")
    result.extras.update(
        {
            "initial_cost": initial,
            "final_cost": initial - result.best_metric,
            "baseline_cost": baseline,
        }
    )
    return result


def _gcc_search(env, technique: str, budget: SearchBudget, seed: int, **kwargs) -> SearchResult:
    env.reset()
    initial, os_vector = env.observe(["obj_size", "OsBaselineVector"])
    problem = EnvChoiceVectorProblem(env, "obj_size", seed_vectors=[os_vector])
    baseline = problem.evaluate(os_vector)
    if technique == "random":
        result = random_search(problem, budget, seed)
    elif technique == "hillclimb":
        result = hill_climb(problem, budget, seed, **kwargs)
    elif technique == "ga":
        result = genetic_algorithm(problem, budget, seed, **kwargs)
    else:
        raise ValueError(f"technique {technique!r} does not apply to a choice-vector space")
    result.extras.update(
        {
            "initial_cost": initial,
            "final_cost": result.best_metric,
            "baseline_cost": baseline,
        }
    )
    return result


def run_search(
    env_spec: str,
    benchmark: str,
    technique: str,
    budget: SearchBudget,
    seed: int = 0,
    datasets=None,
    out_dir: str | Path | None = None,
    **kwargs,
) -> SearchResult:
    make_kwargs = kwargs.pop("make_kwargs", {})
    if env_spec == "gcc-v0":
        env = optgym.make(
            env_spec, benchmark, action_space="choices", datasets=datasets, **make_kwargs
        )
        search = _gcc_search
    else:
        env = optgym.make(
            env_spec,
            benchmark,
            reward_space="InstructionCount",
            datasets=datasets,
            **make_kwargs,
        )
        search = _tinyir_search
    try:
        result = search(env, technique, budget, seed, **kwargs)
        if out_dir is not None:
            save_result(result, out_dir, datasets=datasets, **make_kwargs)
        return result
    finally:
        env.close()


def run_suite(
    env_spec: str,
    benchmarks: list[str],
    technique: str,
    budget_factory,
    seed: int = 0,
    datasets=None,
    out_dir: str | Path | None = None,
    workers: int = 1,
    **kwargs,
) -> list[SearchResult]:
    """Run one technique across benchmarks, optionally in parallel workers."""

    def one(benchmark: str) -> SearchResult:
        return run_search(
            env_spec,
            benchmark,
            technique,
            budget_factory(),
            seed=seed,
            datasets=datasets,
            out_dir=out_dir,
            **kwargs,
        )

    if workers <= 1:
        return [one(b) for b in benchmarks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, benchmarks))
