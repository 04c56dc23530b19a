"""Seeded random program generator.

Digest stability across platforms and Python versions matters here: the
generated program for a given seed is part of the replay-validation
contract. The generator therefore uses its own fixed PRNG (splitmix64
seeding a xoshiro256** stream, both pure 64-bit integer arithmetic)
rather than any library generator whose stream might change.
"""

from __future__ import annotations

from optgym.tinyir.ir import Instruction, Program

_MASK64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256StarStar:
    """xoshiro256** with splitmix64 state expansion from a 32-bit seed."""

    def __init__(self, seed: int):
        x = seed & 0xFFFFFFFF
        state = []
        for _ in range(4):
            x = (x + 0x9E3779B97F4A7C15) & _MASK64
            z = x
            z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
            z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
            state.append(z ^ (z >> 31))
        self._s = state

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def below(self, n: int) -> int:
        # Modulo bias is irrelevant here; determinism is what matters.
        return self.next_u64() % n


def _generate(rng: Xoshiro256StarStar, size: int) -> Program:
    arity = rng.below(5)
    n_outputs = 1 + rng.below(3)
    n_defs = max(1, size - n_outputs)

    # Per-program opcode mix; binops dominate so passes have material to work on.
    w_const = 2 + rng.below(4)
    w_binop = 5 + rng.below(6)
    w_id = 1 + rng.below(2)
    w_input = 1 + rng.below(2) if arity else 0
    total_w = w_const + w_binop + w_id + w_input

    # Operand locality: higher values leave more early registers dead.
    locality = 3 + rng.below(10)

    instructions: list[Instruction] = []

    def pick_reg(n_defined: int) -> int:
        if rng.below(100) < 60:
            lo = max(0, n_defined - locality)
            return lo + rng.below(n_defined - lo)
        return rng.below(n_defined)

    def const_value() -> int:
        r = rng.below(100)
        if r < 20:
            return 2
        if r < 70:
            return rng.below(21) - 10
        return rng.below(1 << 20) - (1 << 19)

    for i in range(n_defs):
        if i == 0:
            if arity and rng.below(2):
                instructions.append(Instruction("input", 0, rng.below(arity)))
            else:
                instructions.append(Instruction("const", 0, const_value()))
            continue
        w = rng.below(total_w)
        if w < w_const:
            instructions.append(Instruction("const", i, const_value()))
        elif w < w_const + w_binop:
            op = ("add", "sub", "mul")[rng.below(3)]
            instructions.append(Instruction(op, i, pick_reg(i), pick_reg(i)))
        elif w < w_const + w_binop + w_id:
            instructions.append(Instruction("id", i, pick_reg(i)))
        else:
            instructions.append(Instruction("input", i, rng.below(arity)))

    for _ in range(n_outputs):
        # Bias outputs toward late registers so a nontrivial slice stays live.
        span = max(1, n_defs // 3)
        src = n_defs - 1 - rng.below(span)
        instructions.append(Instruction("output", None, src))

    return Program(tuple(instructions), arity)


def generate(seed: int) -> Program:
    """Deterministic program for a 32-bit seed; size uniform in [20, 200]."""
    rng = Xoshiro256StarStar(seed)
    size = 20 + rng.below(181)
    return _generate(rng, size)


def generate_stress(seed: int) -> Program:
    """Large variant (20k-50k instructions) for performance testing.

    Parsing or generating one of these is orders of magnitude more
    expensive than cloning it, which is what cache benchmarks need.
    """
    rng = Xoshiro256StarStar(seed ^ 0x5EED5EED)
    size = 20_000 + rng.below(30_001)
    return _generate(rng, size)
