"""Search techniques over environments and bounded integer choice spaces.

Every technique is a pure function of (benchmark content, seed, budget,
config) given a deterministic backend, tracks its best-so-far
monotonically, and produces a SearchResult whose best state replay-
validates before it is persisted.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from optgym.errors import BudgetInvalidError, DigestMismatchError, OptGymError
from optgym.state import EnvState


@dataclass
class SearchBudget:
    """Bounds on a search: wall time, evaluation count, and/or patience."""

    wall_seconds: float | None = None
    max_compilations: int | None = None
    patience: int | None = None

    def __post_init__(self):
        if self.wall_seconds is None and self.max_compilations is None and self.patience is None:
            raise BudgetInvalidError("set at least one of wall_seconds/max_compilations/patience")
        if self.wall_seconds is not None and self.wall_seconds <= 0:
            raise BudgetInvalidError("wall_seconds must be positive")
        if self.max_compilations is not None and self.max_compilations < 1:
            raise BudgetInvalidError("max_compilations must be >= 1")
        if self.patience is not None and self.patience < 1:
            raise BudgetInvalidError("patience must be >= 1")


class BudgetTracker:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.evaluations = 0
        self.started = time.monotonic()

    def count(self, n: int = 1) -> None:
        self.evaluations += n

    @property
    def wall_seconds(self) -> float:
        return time.monotonic() - self.started

    def exhausted(self) -> bool:
        b = self.budget
        if b.max_compilations is not None and self.evaluations >= b.max_compilations:
            return True
        if b.wall_seconds is not None and self.wall_seconds >= b.wall_seconds:
            return True
        return False


@dataclass
class SearchResult:
    technique: str
    benchmark: str
    best_state: EnvState
    best_metric: float
    evaluations: int
    wall_seconds: float
    seed: int
    extras: dict = field(default_factory=dict)

    def meta_dict(self) -> dict:
        return {
            "technique": self.technique,
            "benchmark": self.benchmark,
            "best_metric": self.best_metric,
            "evaluations": self.evaluations,
            "wall_seconds": self.wall_seconds,
            "seed": self.seed,
            "extras": self.extras,
        }


@dataclass
class ReplayReport:
    ok: bool
    reason: str = ""
    step_index: int | None = None
    expected: str = ""
    actual: str = ""


def replay_report(result: SearchResult, **restore_kwargs) -> ReplayReport:
    """Re-execute the best state's actions and compare digest and reward."""
    import optgym

    state = result.best_state
    try:
        env = optgym.restore_state(state, **restore_kwargs)
        env.close()
        return ReplayReport(ok=True)
    except DigestMismatchError as e:
        return ReplayReport(
            ok=False,
            reason="digest-mismatch",
            step_index=len(state.actions),
            expected=state.state_digest,
            actual=e.message,
        )
    except OptGymError as e:
        return ReplayReport(ok=False, reason=e.code)


def replay_validate(result: SearchResult, **restore_kwargs) -> bool:
    return replay_report(result, **restore_kwargs).ok


def _slug(benchmark: str) -> str:
    return benchmark.replace("benchmark://", "").replace("/", "_").replace(".", "-")


def save_result(
    result: SearchResult, out_dir: str | Path, validate: bool = True, **restore_kwargs
) -> tuple[Path, Path]:
    """Persist a result as EnvState JSON plus a sidecar metadata JSON.

    With ``validate`` set (the default) the best state must replay-validate
    first; an invalid result is never written.
    """
    if validate:
        report = replay_report(result, **restore_kwargs)
        if not report.ok:
            raise DigestMismatchError(
                f"result failed replay validation ({report.reason}) and was not saved"
            )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{result.technique}-{_slug(result.benchmark)}-seed{result.seed}"
    state_path = out_dir / f"{stem}.state.json"
    meta_path = out_dir / f"{stem}.meta.json"
    result.best_state.save(state_path)
    meta_path.write_text(json.dumps(result.meta_dict(), indent=2) + "\n", encoding="utf-8")
    return state_path, meta_path


def load_result(state_path: str | Path) -> SearchResult:
    state_path = Path(state_path)
    meta_path = state_path.with_suffix("").with_suffix(".meta.json")
    state = EnvState.load(state_path)
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    return SearchResult(
        technique=meta["technique"],
        benchmark=meta["benchmark"],
        best_state=state,
        best_metric=float(meta["best_metric"]),
        evaluations=int(meta["evaluations"]),
        wall_seconds=float(meta["wall_seconds"]),
        seed=int(meta["seed"]),
        extras=meta.get("extras", {}),
    )


from optgym.autotune.problems import EnvChoiceVectorProblem, VectorProblem  # noqa: E402
from optgym.autotune.random_search import random_search  # noqa: E402
from optgym.autotune.greedy import greedy_search  # noqa: E402
from optgym.autotune.hill_climb import hill_climb  # noqa: E402
from optgym.autotune.genetic import genetic_algorithm  # noqa: E402
from optgym.autotune.report import geomean_report  # noqa: E402

__all__ = [
    "BudgetTracker",
    "EnvChoiceVectorProblem",
    "ReplayReport",
    "SearchBudget",
    "SearchResult",
    "VectorProblem",
    "genetic_algorithm",
    "geomean_report",
    "greedy_search",
    "hill_climb",
    "load_result",
    "random_search",
    "replay_report",
    "replay_validate",
    "save_result",
]
