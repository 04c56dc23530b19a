"""The checked-in benchmark suite: small handwritten programs.

Each program exercises a known mix of optimization opportunities (dead
code, foldable constants, duplicate expressions, copy chains, mul-by-two)
so searches can be judged against optima established by exhaustive
search. ``suite/optima.json`` freezes, for every program, the minimal
instruction count reachable by any pass sequence of length at most six.
"""

from __future__ import annotations

import json
from importlib import resources

from optgym.errors import UnknownBenchmarkError
from optgym.tinyir.ir import Program, parse_program

SUITE_ORACLE_DEPTH = 6


def _suite_dir():
    return resources.files("optgym.tinyir") / "suite"


def suite_names() -> list[str]:
    names = sorted(
        p.name[: -len(".tir")] for p in _suite_dir().iterdir() if p.name.endswith(".tir")
    )
    return names


def load_suite_program(name: str) -> Program:
    path = _suite_dir() / f"{name}.tir"
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UnknownBenchmarkError(f"no suite program named {name!r}")
    return parse_program(text)


def known_optima() -> dict[str, int]:
    """Frozen minimal instruction counts (exhaustive search, depth <= 6)."""
    text = (_suite_dir() / "optima.json").read_text(encoding="utf-8")
    return json.loads(text)
