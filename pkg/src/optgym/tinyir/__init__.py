from optgym.tinyir.ir import Instruction, Program, format_program, parse_program, program_digest
from optgym.tinyir.interp import interpret
from optgym.tinyir.passes import PASS_NAMES, baseline_cost, run_pass
from optgym.tinyir.generate import generate, generate_stress
from optgym.tinyir.observation import observation

__all__ = [
    "Instruction",
    "Program",
    "PASS_NAMES",
    "baseline_cost",
    "format_program",
    "generate",
    "generate_stress",
    "interpret",
    "observation",
    "parse_program",
    "program_digest",
    "run_pass",
]
