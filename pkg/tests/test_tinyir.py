"""Tests for the straight-line IR: parser, interpreter, passes, generator."""

import pytest

from optgym.errors import MalformedProgramError, UnknownPassError
from optgym.tinyir import (
    PASS_NAMES,
    baseline_cost,
    format_program,
    generate,
    interpret,
    observation,
    parse_program,
    program_digest,
    run_pass,
)
from optgym.tinyir.generate import Xoshiro256StarStar
from optgym.tinyir.ir import Instruction, Program, validate_program
from optgym.tinyir.suite import known_optima, load_suite_program, suite_names

FOLD_EXAMPLE = """
.inputs 0
r0 = const 2
r1 = const 3
r2 = add r0 r1
output r2
"""


def random_inputs(rng: Xoshiro256StarStar, arity: int) -> list[int]:
    return [rng.next_u64() - (1 << 63) for _ in range(arity)]


class TestInterpreter:
    def test_mul_inputs(self):
        prog = parse_program(".inputs 2\nr0 = input 0\nr1 = input 1\nr2 = mul r0 r1\noutput r2\n")
        assert interpret(prog, [6, 7]) == [42]

    def test_consts_only_independent_of_inputs(self):
        prog = parse_program(".inputs 0\nr0 = const 5\nr1 = add r0 r0\noutput r1\n")
        assert interpret(prog, []) == [10]

    def test_wrapping_add(self):
        prog = parse_program(
            ".inputs 0\nr0 = const 9223372036854775807\nr1 = const 1\nr2 = add r0 r1\noutput r2\n"
        )
        assert interpret(prog, []) == [-(2**63)]

    def test_arity_mismatch(self):
        prog = parse_program(".inputs 1\nr0 = input 0\noutput r0\n")
        with pytest.raises(MalformedProgramError):
            interpret(prog, [1, 2])


class TestParser:
    def test_round_trip_canonical(self):
        prog = parse_program(FOLD_EXAMPLE)
        assert parse_program(format_program(prog)) == prog

    def test_use_before_def(self):
        with pytest.raises(MalformedProgramError):
            parse_program(".inputs 0\nr0 = add r1 r2\noutput r0\n")

    def test_double_definition(self):
        with pytest.raises(MalformedProgramError):
            parse_program(".inputs 0\nr0 = const 1\nr0 = const 2\noutput r0\n")

    def test_missing_output(self):
        with pytest.raises(MalformedProgramError):
            parse_program(".inputs 0\nr0 = const 1\n")

    def test_input_index_out_of_range(self):
        with pytest.raises(MalformedProgramError):
            parse_program(".inputs 1\nr0 = input 1\noutput r0\n")

    def test_comma_separated_operands_accepted(self):
        prog = parse_program(".inputs 0\nr0 = const 1\nr1 = add r0, r0\noutput r1\n")
        assert prog.instructions[1] == Instruction("add", 1, 0, 0)


class TestPasses:
    def test_constfold_then_dce_forced_example(self):
        prog = parse_program(FOLD_EXAMPLE)
        folded = run_pass(prog, "constfold")
        assert len(folded) == 4
        assert folded.instructions[2] == Instruction("const", 2, 5)
        cleaned = run_pass(folded, "dce")
        assert len(cleaned) == 2
        assert format_program(cleaned) == ".inputs 0\nr2 = const 5\noutput r2\n"

    def test_dce_no_dead_code_is_identity(self):
        prog = parse_program(".inputs 1\nr0 = input 0\nr1 = add r0 r0\noutput r1\n")
        assert run_pass(prog, "dce") == prog

    def test_cse_replaces_duplicate_with_id(self):
        prog = parse_program(
            ".inputs 2\nr0 = input 0\nr1 = input 1\nr2 = add r0 r1\nr3 = add r0 r1\noutput r3\n"
        )
        out = run_pass(prog, "cse")
        assert out.instructions[3] == Instruction("id", 3, 2)

    def test_copyprop_rewrites_through_chains(self):
        prog = parse_program(
            ".inputs 1\nr0 = input 0\nr1 = id r0\nr2 = id r1\nr3 = add r2 r2\noutput r3\n"
        )
        out = run_pass(prog, "copyprop")
        assert out.instructions[2] == Instruction("id", 2, 0)
        assert out.instructions[3] == Instruction("add", 3, 0, 0)

    def test_canonicalize_orders_commutative_operands(self):
        prog = parse_program(
            ".inputs 2\nr0 = input 0\nr1 = input 1\nr2 = add r1 r0\nr3 = sub r1 r0\noutput r2\noutput r3\n"
        )
        out = run_pass(prog, "canonicalize")
        assert out.instructions[2] == Instruction("add", 2, 0, 1)
        # sub is not commutative and must not be reordered
        assert out.instructions[3] == Instruction("sub", 3, 1, 0)

    def test_strength_reduce_mul_by_two(self):
        prog = parse_program(
            ".inputs 1\nr0 = input 0\nr1 = const 2\nr2 = mul r0 r1\nr3 = mul r1 r0\noutput r2\noutput r3\n"
        )
        out = run_pass(prog, "strength-reduce")
        assert out.instructions[2] == Instruction("add", 2, 0, 0)
        assert out.instructions[3] == Instruction("add", 3, 0, 0)

    def test_unknown_pass(self):
        prog = parse_program(FOLD_EXAMPLE)
        with pytest.raises(UnknownPassError):
            run_pass(prog, "loop-unroll")

    @pytest.mark.parametrize("pass_id", PASS_NAMES)
    def test_idempotent_on_own_fixpoint(self, pass_id):
        for seed in range(40):
            once = run_pass(generate(seed), pass_id)
            assert run_pass(once, pass_id) == once

    @pytest.mark.parametrize("pass_id", ["dce", "cse", "constfold", "copyprop"])
    def test_instruction_count_never_increases(self, pass_id):
        for seed in range(40):
            prog = generate(seed)
            assert len(run_pass(prog, pass_id)) <= len(prog)

    @pytest.mark.parametrize("pass_id", PASS_NAMES)
    def test_semantics_preserved_sample(self, pass_id):
        # Small differential sample; the full 1000x6x8 run is in acceptance.
        for seed in range(25):
            prog = generate(seed)
            transformed = run_pass(prog, pass_id)
            rng = Xoshiro256StarStar(seed ^ 0xD1FF)
            for _ in range(4):
                inputs = random_inputs(rng, prog.inputs_arity)
                assert interpret(prog, inputs) == interpret(transformed, inputs)

    def test_pass_output_remains_valid(self):
        for seed in range(25):
            prog = generate(seed)
            for pass_id in PASS_NAMES:
                validate_program(run_pass(prog, pass_id))


class TestBaselineCost:
    def test_already_minimal_program(self):
        prog = parse_program(".inputs 1\nr0 = input 0\noutput r0\n")
        assert baseline_cost(prog) == len(prog)

    def test_fold_example_reaches_two(self):
        assert baseline_cost(parse_program(FOLD_EXAMPLE)) == 2

    def test_never_exceeds_instruction_count(self):
        for seed in range(100):
            prog = generate(seed)
            assert baseline_cost(prog) <= len(prog)


class TestGenerator:
    def test_deterministic(self):
        assert format_program(generate(1)) == format_program(generate(1))

    def test_distinct_seeds_differ(self):
        assert format_program(generate(1)) != format_program(generate(2))

    def test_invariants_hold(self):
        for seed in range(200):
            prog = generate(seed)
            validate_program(prog, dense_registers=True)
            assert 20 <= len(prog) <= 200

    def test_text_round_trip(self):
        for seed in range(50):
            prog = generate(seed)
            assert parse_program(format_program(prog)) == prog

    def test_digest_is_hex64(self):
        digest = program_digest(generate(3))
        assert len(digest) == 64
        assert digest == digest.lower()
        int(digest, 16)


class TestObservation:
    def test_folded_example_counts(self):
        prog = parse_program(".inputs 0\nr2 = const 5\noutput r2\n")
        assert observation(prog, "InstCount") == 2
        assert observation(prog, "OpcodeHistogram") == [1, 0, 0, 0, 0, 0, 1]

    def test_histogram_sums_to_instcount(self):
        for seed in range(100):
            prog = generate(seed)
            assert sum(observation(prog, "OpcodeHistogram")) == len(prog)

    def test_ir_round_trips(self):
        prog = generate(1)
        assert parse_program(observation(prog, "Ir")) == prog


class TestSuite:
    def test_at_least_twenty_programs(self):
        assert len(suite_names()) >= 20

    def test_all_programs_valid(self):
        for name in suite_names():
            validate_program(load_suite_program(name), dense_registers=True)

    def test_frozen_optima_match_exhaustive_search(self):
        # Independent oracle: breadth-first over pass applications to depth 6.
        optima = known_optima()
        for name in suite_names():
            prog = load_suite_program(name)
            best = len(prog)
            seen = {program_digest(prog)}
            frontier = [prog]
            for _ in range(6):
                nxt = []
                for p in frontier:
                    for pass_id in PASS_NAMES:
                        q = run_pass(p, pass_id)
                        d = program_digest(q)
                        if d not in seen:
                            seen.add(d)
                            best = min(best, len(q))
                            nxt.append(q)
                frontier = nxt
            assert optima[name] == best, name
