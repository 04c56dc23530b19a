"""Suite-level reporting: geometric mean size reduction vs the baseline."""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

from optgym.autotune import SearchResult, load_result


def geomean(ratios: list[float]) -> float:
    if not ratios:
        return 0.0
    return math.exp(sum(math.log(r) for r in ratios) / len(ratios))


def result_ratio(result: SearchResult) -> float | None:
    """baseline_size / best_size; needs both recorded in the extras."""
    extras = result.extras
    baseline = extras.get("baseline_cost")
    final = extras.get("final_cost")
    if not baseline or not final:
        return None
    return float(baseline) / float(final)


def geomean_report(results: list[SearchResult]) -> dict[str, dict]:
    """Per-technique geomean of (baseline size / best size) across benchmarks."""
    by_technique: dict[str, list[float]] = defaultdict(list)
    for result in results:
        ratio = result_ratio(result)
        if ratio is not None:
            by_technique[result.technique].append(ratio)
    return {
        technique: {"geomean": geomean(ratios), "benchmarks": len(ratios)}
        for technique, ratios in sorted(by_technique.items())
    }


def load_results_dir(directory: str | Path) -> list[SearchResult]:
    return [load_result(p) for p in sorted(Path(directory).glob("*.state.json"))]


def format_report(report: dict[str, dict]) -> str:
    lines = [f"{'technique':<12} {'benchmarks':>10} {'geomean reduction':>18}"]
    for technique, row in report.items():
        lines.append(f"{technique:<12} {row['benchmarks']:>10} {row['geomean']:>17.3f}x")
    return "\n".join(lines)
