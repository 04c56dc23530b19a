"""Observation functions over tinyir programs."""

from __future__ import annotations

from optgym.errors import UnknownSpaceError
from optgym.tinyir.ir import Program, format_program
from optgym.tinyir.passes import baseline_cost

# Fixed histogram bin order; entries sum to the instruction count.
HISTOGRAM_BINS = ("const", "add", "sub", "mul", "id", "input", "output")


def opcode_histogram(program: Program) -> list[int]:
    counts = dict.fromkeys(HISTOGRAM_BINS, 0)
    for ins in program.instructions:
        counts[ins.op] += 1
    return [counts[op] for op in HISTOGRAM_BINS]


def observation(program: Program, space_id: str):
    if space_id == "InstCount":
        return len(program)
    if space_id == "OpcodeHistogram":
        return opcode_histogram(program)
    if space_id == "Ir":
        return format_program(program)
    if space_id == "BaselineInstCount":
        return baseline_cost(program)
    raise UnknownSpaceError(f"unknown observation space {space_id!r}")
