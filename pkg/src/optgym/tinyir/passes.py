"""The optimization pass catalog: the discrete action space of tinyir.

Every pass is a pure ``Program -> Program`` function that preserves
interpreter semantics and is idempotent (``p(p(x)) == p(x)``). Passes
deliberately do not subsume each other: constant folding only fires on
registers defined directly by ``const``, so a fold blocked behind an
``id`` chain needs copyprop first. Ordering therefore matters, which is
the point of a phase-ordering environment.
"""

from __future__ import annotations

from optgym.errors import UnknownPassError
from optgym.tinyir.interp import wrap64
from optgym.tinyir.ir import BINOPS, Instruction, Program, format_program


def constfold(program: Program) -> Program:
    """Fold binops whose operands are both const-defined, in one forward scan."""
    const_value: dict[int, int] = {}
    out: list[Instruction] = []
    for ins in program.instructions:
        if ins.op == "const":
            const_value[ins.dest] = ins.a
            out.append(ins)
        elif ins.op in BINOPS and ins.a in const_value and ins.b in const_value:
            x, y = const_value[ins.a], const_value[ins.b]
            if ins.op == "add":
                v = wrap64(x + y)
            elif ins.op == "sub":
                v = wrap64(x - y)
            else:
                v = wrap64(x * y)
            const_value[ins.dest] = v
            out.append(Instruction("const", ins.dest, v))
        else:
            out.append(ins)
    return Program(tuple(out), program.inputs_arity)


def dce(program: Program) -> Program:
    """Remove instructions whose results never reach an output."""
    live: set[int] = set()
    keep = [False] * len(program.instructions)
    for i in range(len(program.instructions) - 1, -1, -1):
        ins = program.instructions[i]
        if ins.op == "output" or ins.dest in live:
            keep[i] = True
            live.update(ins.uses())
    out = tuple(ins for i, ins in enumerate(program.instructions) if keep[i])
    return Program(out, program.inputs_arity)


def cse(program: Program) -> Program:
    """Replace a binop repeating an earlier (op, lhs, rhs) with an id of it."""
    seen: dict[tuple[str, int, int], int] = {}
    out: list[Instruction] = []
    for ins in program.instructions:
        if ins.op in BINOPS:
            key = (ins.op, ins.a, ins.b)
            prior = seen.get(key)
            if prior is not None:
                out.append(Instruction("id", ins.dest, prior))
                continue
            seen[key] = ins.dest
        out.append(ins)
    return Program(tuple(out), program.inputs_arity)


def copyprop(program: Program) -> Program:
    """Rewrite uses of id-defined registers to their (transitive) source.

    The id instructions themselves are left in place for dce to collect.
    """
    root: dict[int, int] = {}

    def resolve(reg: int) -> int:
        return root.get(reg, reg)

    out: list[Instruction] = []
    for ins in program.instructions:
        if ins.op == "id":
            root[ins.dest] = resolve(ins.a)
            out.append(Instruction("id", ins.dest, resolve(ins.a)))
        elif ins.op in BINOPS:
            out.append(Instruction(ins.op, ins.dest, resolve(ins.a), resolve(ins.b)))
        elif ins.op == "output":
            out.append(Instruction("output", None, resolve(ins.a)))
        else:
            out.append(ins)
    return Program(tuple(out), program.inputs_arity)


def canonicalize(program: Program) -> Program:
    """Order commutative (add, mul) operands by register index ascending."""
    out: list[Instruction] = []
    for ins in program.instructions:
        if ins.op in ("add", "mul") and ins.a > ins.b:
            out.append(Instruction(ins.op, ins.dest, ins.b, ins.a))
        else:
            out.append(ins)
    return Program(tuple(out), program.inputs_arity)


def strength_reduce(program: Program) -> Program:
    """Rewrite mul-by-const-2 as an add of the other operand with itself."""
    const_value: dict[int, int] = {}
    out: list[Instruction] = []
    for ins in program.instructions:
        if ins.op == "const":
            const_value[ins.dest] = ins.a
        if ins.op == "mul":
            if const_value.get(ins.b) == 2:
                out.append(Instruction("add", ins.dest, ins.a, ins.a))
                continue
            if const_value.get(ins.a) == 2:
                out.append(Instruction("add", ins.dest, ins.b, ins.b))
                continue
        out.append(ins)
    return Program(tuple(out), program.inputs_arity)


PASSES = {
    "constfold": constfold,
    "dce": dce,
    "cse": cse,
    "copyprop": copyprop,
    "canonicalize": canonicalize,
    "strength-reduce": strength_reduce,
}

PASS_NAMES = tuple(PASSES)

# The stand-in for the compiler's default size pipeline (-Os analogue).
BASELINE_PIPELINE = ("canonicalize", "constfold", "cse", "copyprop", "dce")

MAX_BASELINE_ITERATIONS = 100


def run_pass(program: Program, pass_id: str) -> Program:
    try:
        fn = PASSES[pass_id]
    except KeyError:
        raise UnknownPassError(f"unknown pass {pass_id!r}")
    return fn(program)


def baseline_program(program: Program) -> Program:
    """Run the default pipeline to fixpoint (bounded iteration count)."""
    current = program
    text = format_program(current)
    for _ in range(MAX_BASELINE_ITERATIONS):
        for name in BASELINE_PIPELINE:
            current = PASSES[name](current)
        new_text = format_program(current)
        if new_text == text:
            break
        text = new_text
    return current


def baseline_cost(program: Program) -> int:
    """Instruction count after the default pipeline; the reward-scaling denominator."""
    return len(baseline_program(program))
