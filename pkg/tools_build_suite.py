"""One-off: emit the handwritten suite .tir files and report design stats."""

import sys

sys.path.insert(0, "src")

from pathlib import Path

from optgym.tinyir.ir import parse_program, format_program, program_digest, validate_program
from optgym.tinyir.passes import PASS_NAMES, run_pass, baseline_cost, dce

OUT = Path("src/optgym/tinyir/suite")
OUT.mkdir(parents=True, exist_ok=True)

PROGRAMS = {
    # --- dce-dominant programs: nearly all slack is plain dead code ---
    "dead-wide": """
.inputs 1
r0 = input 0
r1 = const 7
r2 = const -3
r3 = add r1 r2
r4 = mul r1 r1
r5 = const 100
r6 = sub r5 r1
r7 = add r0 r0
r8 = sub r1 r2
r9 = mul r2 r2
r10 = add r4 r5
output r7
""",
    "dead-deep": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = const 3
r3 = add r2 r2
r4 = mul r3 r2
r5 = sub r4 r3
r6 = add r5 r4
r7 = mul r6 r5
r8 = add r7 r6
r9 = sub r8 r7
r10 = add r0 r1
output r10
""",
    "dead-inputs": """
.inputs 4
r0 = input 0
r1 = input 1
r2 = input 2
r3 = input 3
r4 = add r0 r1
r5 = mul r2 r3
r6 = sub r5 r4
r7 = add r6 r6
r8 = mul r7 r5
r9 = add r0 r1
r10 = sub r9 r0
output r10
""",
    "dead-mixed-arith": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = sub r0 r1
r3 = mul r0 r1
r4 = add r3 r2
r5 = sub r4 r3
r6 = mul r5 r4
r7 = add r0 r1
r8 = sub r7 r1
r9 = mul r8 r7
r10 = add r2 r0
output r10
""",
    "dead-islands": """
.inputs 1
r0 = input 0
r1 = const 11
r2 = mul r1 r1
r3 = const 13
r4 = mul r3 r3
r5 = const 17
r6 = mul r5 r5
r7 = const 19
r8 = mul r7 r7
r9 = add r2 r4
r10 = add r6 r8
r11 = add r9 r10
r12 = sub r0 r0
output r12
""",
    "dead-ladder": """
.inputs 3
r0 = input 0
r1 = input 1
r2 = input 2
r3 = add r0 r1
r4 = add r3 r2
r5 = add r4 r0
r6 = add r5 r1
r7 = add r6 r2
r8 = mul r0 r1
r9 = mul r8 r2
r10 = mul r9 r0
r11 = mul r10 r1
r12 = sub r1 r2
output r12
""",
    "dead-fanout": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = add r0 r1
r3 = mul r2 r0
r4 = mul r2 r1
r5 = add r3 r4
r6 = sub r3 r4
r7 = mul r5 r6
r8 = add r2 r2
r9 = sub r8 r2
r10 = mul r0 r0
output r10
""",
    "dead-consts": """
.inputs 1
r0 = input 0
r1 = const 5
r2 = const 6
r3 = const 7
r4 = const 8
r5 = const 9
r6 = const 10
r7 = const 11
r8 = const 12
r9 = add r0 r0
output r9
""",
    "dead-after-use": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = add r0 r1
r3 = mul r2 r2
r4 = sub r3 r2
r5 = add r4 r3
r6 = mul r5 r4
r7 = add r6 r5
output r2
""",
    "dead-two-outputs": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = add r0 r1
r3 = sub r0 r1
r4 = mul r2 r3
r5 = add r4 r4
r6 = mul r5 r4
r7 = sub r6 r5
r8 = add r7 r6
output r2
output r3
""",
    "fold-garnish": """
.inputs 1
r0 = input 0
r1 = const 4
r2 = const 9
r3 = add r1 r2
r4 = mul r0 r3
r5 = add r0 r1
r6 = sub r5 r4
r7 = mul r6 r5
r8 = add r7 r6
r9 = sub r8 r7
r10 = mul r9 r8
r11 = add r10 r9
r12 = sub r11 r10
r13 = mul r12 r11
r14 = add r13 r12
r15 = sub r14 r13
r16 = mul r15 r14
r17 = add r16 r15
r18 = sub r17 r16
r19 = mul r18 r17
r20 = add r19 r18
r21 = sub r20 r19
r22 = add r0 r0
output r22
""",
    "cse-garnish": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = add r0 r1
r3 = add r0 r1
r4 = mul r3 r3
r5 = sub r4 r3
r6 = add r5 r4
r7 = mul r6 r5
r8 = sub r7 r6
r9 = add r8 r7
r10 = mul r9 r8
r11 = sub r10 r9
r12 = add r11 r10
r13 = mul r12 r11
r14 = sub r13 r12
r15 = add r14 r13
r16 = mul r15 r14
r17 = sub r16 r15
r18 = add r17 r16
output r2
""",
    "dead-strength": """
.inputs 1
r0 = input 0
r1 = const 2
r2 = mul r0 r1
r3 = mul r2 r1
r4 = mul r3 r1
r5 = add r4 r3
r6 = sub r5 r4
r7 = mul r6 r5
r8 = add r7 r6
r9 = sub r8 r7
r10 = sub r0 r0
output r10
""",
    "wrapping-dead": """
.inputs 1
r0 = input 0
r1 = const 9223372036854775807
r2 = const 1
r3 = add r1 r2
r4 = mul r3 r1
r5 = sub r4 r3
r6 = add r5 r4
r7 = mul r6 r5
r8 = add r0 r0
output r8
""",
    "dead-bulk-small-live": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = mul r0 r1
r3 = add r2 r0
r4 = mul r3 r2
r5 = add r4 r3
r6 = mul r5 r4
r7 = add r6 r5
r8 = mul r7 r6
r9 = add r8 r7
r10 = mul r9 r8
r11 = add r10 r9
r12 = mul r11 r10
r13 = sub r0 r1
output r13
""",
    "minimal": """
.inputs 1
r0 = input 0
output r0
""",
    "minimal-arith": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = add r0 r1
r3 = mul r2 r0
output r3
""",
    "dead-heavy-mul": """
.inputs 1
r0 = input 0
r1 = mul r0 r0
r2 = mul r1 r0
r3 = mul r2 r1
r4 = mul r3 r2
r5 = mul r4 r3
r6 = mul r5 r4
r7 = mul r6 r5
r8 = mul r7 r6
r9 = mul r8 r7
r10 = mul r9 r8
r11 = mul r10 r9
r12 = add r0 r0
output r12
""",
    "live-fold-mix": """
.inputs 1
r0 = input 0
r1 = const 10
r2 = const 20
r3 = add r1 r2
r4 = add r0 r3
r5 = mul r4 r0
r6 = add r5 r4
r7 = sub r6 r5
r8 = mul r7 r6
r9 = add r8 r7
r10 = sub r9 r8
r11 = mul r10 r9
r12 = add r11 r10
r13 = sub r12 r11
r14 = mul r13 r12
r15 = add r14 r13
r16 = sub r15 r14
r17 = mul r16 r15
r18 = add r17 r16
r19 = sub r18 r17
r20 = mul r19 r18
r21 = add r20 r19
r22 = sub r21 r20
r23 = mul r22 r21
r24 = add r23 r22
output r4
""",
    "live-cse-mix": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = add r0 r1
r3 = add r0 r1
r4 = mul r2 r3
r5 = sub r1 r0
r6 = mul r5 r5
r7 = add r6 r5
r8 = sub r7 r6
r9 = mul r8 r7
r10 = add r9 r8
r11 = sub r10 r9
r12 = mul r11 r10
r13 = add r12 r11
r14 = sub r13 r12
r15 = mul r14 r13
r16 = add r15 r14
output r4
""",
    "live-strength-mix": """
.inputs 1
r0 = input 0
r1 = const 2
r2 = mul r0 r1
r3 = add r2 r0
r4 = mul r3 r3
r5 = add r4 r3
r6 = sub r5 r4
r7 = mul r6 r5
r8 = add r7 r6
r9 = sub r8 r7
r10 = mul r9 r8
r11 = add r10 r9
r12 = sub r11 r10
r13 = mul r12 r11
output r3
""",
    # --- trap programs: gains are locked behind count-neutral passes ---
    "trap-fold-chain": """
.inputs 0
r0 = const 3
r1 = const 5
r2 = add r0 r1
r3 = mul r2 r0
r4 = sub r3 r1
r5 = add r4 r2
r6 = mul r5 r3
r7 = add r6 r4
output r7
""",
    "trap-copy-chain": """
.inputs 1
r0 = input 0
r1 = id r0
r2 = id r1
r3 = id r2
r4 = id r3
r5 = id r4
r6 = id r5
r7 = add r6 r6
output r7
""",
    "trap-cse": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = add r0 r1
r3 = add r0 r1
r4 = add r0 r1
r5 = add r0 r1
r6 = mul r2 r3
r7 = mul r4 r5
r8 = add r6 r7
output r8
""",
    "trap-commute": """
.inputs 2
r0 = input 0
r1 = input 1
r2 = add r0 r1
r3 = add r1 r0
r4 = mul r2 r3
r5 = mul r3 r2
r6 = add r4 r5
output r6
""",
    "trap-strength-two": """
.inputs 1
r0 = input 0
r1 = const 2
r2 = mul r0 r1
r3 = mul r1 r0
r4 = add r2 r3
output r4
""",
}


def oracle_min_count(program, depth):
    best = len(program)
    seen = {program_digest(program): 0}
    frontier = [program]
    for d in range(depth):
        nxt = []
        for prog in frontier:
            for name in PASS_NAMES:
                new = run_pass(prog, name)
                dig = program_digest(new)
                if dig in seen:
                    continue
                seen[dig] = d + 1
                best = min(best, len(new))
                nxt.append(new)
        frontier = nxt
        if not frontier:
            break
    return best


def main():
    import json

    optima = {}
    ok_count = 0
    trap_count = 0
    for name, text in sorted(PROGRAMS.items()):
        prog = parse_program(text.strip() + "\n")
        validate_program(prog, dense_registers=True)
        (OUT / f"{name}.tir").write_text(format_program(prog), encoding="utf-8")
        n0 = len(prog)
        n_dce = len(dce(prog))
        n_opt = oracle_min_count(prog, 6)
        optima[name] = n_opt
        oracle_red = n0 - n_opt
        greedy_red = n0 - n_dce  # greedy commits only direct count reductions
        ratio = 1.0 if oracle_red == 0 else greedy_red / oracle_red
        tag = "ok " if ratio >= 0.9 else "TRAP"
        if ratio >= 0.9:
            ok_count += 1
        else:
            trap_count += 1
        print(
            f"{tag} {name:24s} n0={n0:3d} dce={n_dce:3d} opt={n_opt:3d} "
            f"baseline={baseline_cost(prog):3d} greedy/oracle={ratio:.2f}"
        )
    (OUT / "optima.json").write_text(json.dumps(optima, indent=2, sort_keys=True) + "\n")
    print(f"\ntotal={len(PROGRAMS)} ok={ok_count} traps={trap_count}")
    assert len(PROGRAMS) >= 20
    assert ok_count / len(PROGRAMS) > 0.8, "need margin over the 16/20 greedy acceptance bar"


if __name__ == "__main__":
    main()
