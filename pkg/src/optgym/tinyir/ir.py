"""A straight-line integer IR.

Programs are immutable sequences of instructions in single-assignment
form: every register is defined exactly once, before any use. There is no
control flow, which keeps every analysis total and makes the reference
interpreter a complete semantics oracle.

The canonical text format is the unit of state hashing, so it is pinned
precisely: a ``.inputs K`` header line, then one instruction per line,
lowercase, single spaces, LF line endings::

    .inputs 2
    r0 = input 0
    r1 = input 1
    r2 = add r0 r1
    output r2
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from optgym.errors import MalformedProgramError

BINOPS = ("add", "sub", "mul")
OPS = ("const", "add", "sub", "mul", "id", "input", "output")


@dataclass(frozen=True)
class Instruction:
    """One IR instruction.

    Operand fields are overloaded by opcode:

    * ``const``: ``a`` is the 64-bit signed constant value.
    * ``add``/``sub``/``mul``: ``a`` and ``b`` are source register indices.
    * ``id``: ``a`` is the source register index.
    * ``input``: ``a`` is the input slot index.
    * ``output``: ``a`` is the source register index; ``dest`` is None.
    """

    op: str
    dest: int | None
    a: int = 0
    b: int = 0

    def uses(self) -> tuple[int, ...]:
        if self.op in BINOPS:
            return (self.a, self.b)
        if self.op in ("id", "output"):
            return (self.a,)
        return ()


@dataclass(frozen=True)
class Program:
    instructions: tuple[Instruction, ...]
    inputs_arity: int = 0

    def __len__(self) -> int:
        return len(self.instructions)


def format_instruction(ins: Instruction) -> str:
    if ins.op == "const":
        return f"r{ins.dest} = const {ins.a}"
    if ins.op in BINOPS:
        return f"r{ins.dest} = {ins.op} r{ins.a} r{ins.b}"
    if ins.op == "id":
        return f"r{ins.dest} = id r{ins.a}"
    if ins.op == "input":
        return f"r{ins.dest} = input {ins.a}"
    if ins.op == "output":
        return f"output r{ins.a}"
    raise MalformedProgramError(f"unknown opcode {ins.op!r}")


def format_program(program: Program) -> str:
    lines = [f".inputs {program.inputs_arity}"]
    lines.extend(format_instruction(ins) for ins in program.instructions)
    return "\n".join(lines) + "\n"


def program_digest(program: Program) -> str:
    """SHA-256 hex digest of the canonical text; the replay-validation unit."""
    return hashlib.sha256(format_program(program).encode("utf-8")).hexdigest()


def _parse_reg(token: str, lineno: int) -> int:
    if not token.startswith("r") or not token[1:].isdigit():
        raise MalformedProgramError(f"line {lineno}: expected register, got {token!r}")
    return int(token[1:])


def parse_program(text: str) -> Program:
    """Parse canonical (or whitespace-relaxed) IR text.

    Raises MalformedProgramError on syntax errors or validity violations
    (use before def, double definition, missing output, bad input index).
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MalformedProgramError("empty program text")
    arity = 0
    start = 0
    if lines[0].startswith(".inputs"):
        parts = lines[0].split()
        if len(parts) != 2 or not parts[1].isdigit():
            raise MalformedProgramError("bad .inputs header")
        arity = int(parts[1])
        start = 1
    instructions: list[Instruction] = []
    for lineno, line in enumerate(lines[start:], start + 1):
        toks = line.replace(",", " ").split()
        if toks[0] == "output":
            if len(toks) != 2:
                raise MalformedProgramError(f"line {lineno}: bad output")
            instructions.append(Instruction("output", None, _parse_reg(toks[1], lineno)))
            continue
        if len(toks) < 4 or toks[1] != "=":
            raise MalformedProgramError(f"line {lineno}: expected 'rN = op ...'")
        dest = _parse_reg(toks[0], lineno)
        op = toks[2]
        if op == "const":
            if len(toks) != 4:
                raise MalformedProgramError(f"line {lineno}: bad const")
            try:
                value = int(toks[3])
            except ValueError:
                raise MalformedProgramError(f"line {lineno}: bad const value {toks[3]!r}")
            instructions.append(Instruction("const", dest, value))
        elif op in BINOPS:
            if len(toks) != 5:
                raise MalformedProgramError(f"line {lineno}: bad {op}")
            instructions.append(
                Instruction(op, dest, _parse_reg(toks[3], lineno), _parse_reg(toks[4], lineno))
            )
        elif op == "id":
            if len(toks) != 4:
                raise MalformedProgramError(f"line {lineno}: bad id")
            instructions.append(Instruction("id", dest, _parse_reg(toks[3], lineno)))
        elif op == "input":
            if len(toks) != 4 or not toks[3].isdigit():
                raise MalformedProgramError(f"line {lineno}: bad input")
            instructions.append(Instruction("input", dest, int(toks[3])))
        else:
            raise MalformedProgramError(f"line {lineno}: unknown opcode {op!r}")
    program = Program(tuple(instructions), arity)
    validate_program(program)
    return program


def validate_program(program: Program, dense_registers: bool = False) -> None:
    """Check program validity.

    ``dense_registers`` additionally requires register names r0..rK with no
    gaps, which holds for freshly generated or hand-written programs but
    not necessarily after transformation passes remove instructions.
    """
    defined: set[int] = set()
    has_output = False
    for ins in program.instructions:
        for reg in ins.uses():
            if reg not in defined:
                raise MalformedProgramError(f"use of r{reg} before definition")
        if ins.op == "output":
            has_output = True
            continue
        if ins.op == "input" and not 0 <= ins.a < program.inputs_arity:
            raise MalformedProgramError(f"input index {ins.a} out of range")
        if ins.dest in defined:
            raise MalformedProgramError(f"register r{ins.dest} defined twice")
        defined.add(ins.dest)
    if not has_output:
        raise MalformedProgramError("program has no output instruction")
    if dense_registers and defined and sorted(defined) != list(range(len(defined))):
        raise MalformedProgramError("register names are not dense")
