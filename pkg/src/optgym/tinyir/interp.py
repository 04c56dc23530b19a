"""Reference interpreter; the differential-testing oracle for every pass.

Arithmetic is two's-complement wrapping on 64 bits, so the semantics are
fully defined for all inputs and identical on every platform.
"""

from __future__ import annotations

from optgym.errors import MalformedProgramError
from optgym.tinyir.ir import Program

_MASK = (1 << 64) - 1
_SIGN = 1 << 63


def wrap64(value: int) -> int:
    """Reduce an arbitrary int to signed 64-bit two's-complement."""
    value &= _MASK
    return value - (1 << 64) if value & _SIGN else value


def interpret(program: Program, inputs: list[int]) -> list[int]:
    if len(inputs) != program.inputs_arity:
        raise MalformedProgramError(
            f"program takes {program.inputs_arity} inputs, got {len(inputs)}"
        )
    regs: dict[int, int] = {}
    outputs: list[int] = []
    for ins in program.instructions:
        op = ins.op
        if op == "const":
            regs[ins.dest] = wrap64(ins.a)
        elif op == "add":
            regs[ins.dest] = wrap64(regs[ins.a] + regs[ins.b])
        elif op == "sub":
            regs[ins.dest] = wrap64(regs[ins.a] - regs[ins.b])
        elif op == "mul":
            regs[ins.dest] = wrap64(regs[ins.a] * regs[ins.b])
        elif op == "id":
            regs[ins.dest] = regs[ins.a]
        elif op == "input":
            regs[ins.dest] = wrap64(inputs[ins.a])
        elif op == "output":
            outputs.append(regs[ins.a])
        else:
            raise MalformedProgramError(f"unknown opcode {op!r}")
    return outputs
