"""Generational genetic algorithm over bounded integer choice vectors.

Uniform per-gene crossover, per-gene uniform-resample mutation, elitism
of at least one individual, and size-2 tournament selection. Fitness is
minimized (smaller output is better).
"""

from __future__ import annotations

import random

from optgym.autotune import BudgetTracker, SearchBudget, SearchResult
from optgym.autotune.problems import VectorProblem
from optgym.errors import BudgetInvalidError


def genetic_algorithm(
    vector_space: VectorProblem,
    budget: SearchBudget,
    seed: int = 0,
    population: int = 100,
    mutation_prob: float = 0.1,
    crossover_prob: float = 0.5,
    elite_fraction: float = 0.01,
) -> SearchResult:
    if not isinstance(vector_space, VectorProblem):
        raise BudgetInvalidError("genetic_algorithm needs a bounded integer choice space")
    if budget.max_compilations is not None and population > budget.max_compilations:
        raise BudgetInvalidError(
            f"population {population} exceeds the {budget.max_compilations}-evaluation budget"
        )
    if population < 2:
        raise BudgetInvalidError("population must be >= 2")
    rng = random.Random(seed)
    tracker = BudgetTracker(budget)
    cards = vector_space.cardinalities
    elite_count = max(1, int(population * elite_fraction))

    def random_vector() -> list[int]:
        return [rng.randrange(c) for c in cards]

    def tournament(scored: list[tuple[float, list[int]]]) -> list[int]:
        a = scored[rng.randrange(len(scored))]
        b = scored[rng.randrange(len(scored))]
        return (a if a[0] <= b[0] else b)[1]

    seeds = [list(v) for v in vector_space.initial_candidates()][:population]
    individuals = seeds + [random_vector() for _ in range(population - len(seeds))]
    scored: list[tuple[float, list[int]]] = []
    for vector in individuals:
        if tracker.exhausted():
            break
        scored.append((vector_space.evaluate(vector), vector))
        tracker.count()
    scored.sort(key=lambda s: s[0])
    best_size, best_vector = scored[0][0], list(scored[0][1])
    generation_best = [best_size]

    while not tracker.exhausted():
        next_generation = [list(v) for _, v in scored[:elite_count]]
        while len(next_generation) < population:
            parent_a = tournament(scored)
            parent_b = tournament(scored)
            if rng.random() < crossover_prob:
                child = [
                    parent_a[i] if rng.random() < 0.5 else parent_b[i] for i in range(len(cards))
                ]
            else:
                child = list(parent_a)
            for i in range(len(cards)):
                if rng.random() < mutation_prob:
                    child[i] = rng.randrange(cards[i])
            next_generation.append(child)
        new_scored = scored[:elite_count]
        for vector in next_generation[elite_count:]:
            if tracker.exhausted():
                break
            new_scored.append((vector_space.evaluate(vector), vector))
            tracker.count()
        scored = sorted(new_scored, key=lambda s: s[0])
        if scored[0][0] < best_size:
            best_size, best_vector = scored[0][0], list(scored[0][1])
        generation_best.append(scored[0][0])

    return SearchResult(
        technique="ga",
        benchmark=vector_space.benchmark,
        best_state=vector_space.state_for(best_vector),
        best_metric=best_size,
        evaluations=tracker.evaluations,
        wall_seconds=tracker.wall_seconds,
        seed=seed,
        extras={
            "population": population,
            "generation_best": generation_best,
            "best_vector": best_vector,
        },
    )
