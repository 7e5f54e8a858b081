"""Walk through the two-state example model.

Loads ``ex.tvass``, replays a few traces by hand and prints which
configurations A(0,y) are reachable from A(0,x) for small x and y.

    python demos/01_example_model.py
"""

from pathlib import Path

from tvass import apply_trace, conf, oracle_reach, parse_model

HERE = Path(__file__).parent
ex = parse_model((HERE / "ex.tvass").read_text())

print(f"{ex.num_states} states, {len(ex.transitions)} transitions, norm {ex.norm}")
for t in ex.transitions:
    print("  ", t)

# dAA moves 3 tokens from counter 1 into 4 tokens on counter 2
print("A(3,5) -dAA->", apply_trace(ex, conf("A", 3, 5), ["dAA"]))
# dAB is a zero-test: blocked while counter 1 is positive
print("A(2,9) -dAB->", apply_trace(ex, conf("A", 2, 9), ["dAB"]))

pi = ["dAA", "dAB"] + ["dBB"] * 4 + ["dBA"]
print("A(3,5) -pi->", apply_trace(ex, conf("A", 3, 5), pi))
print("A(5,5) -pi->", apply_trace(ex, conf("A", 5, 5), pi))

print()
print("A(0,x) ->* A(0,y), rows x = 0..7, columns y = 0..12")
print("     " + "".join(f"{y:>3}" for y in range(13)))
for x in range(8):
    row = ""
    for y in range(13):
        v = oracle_reach(ex, conf("A", 0, x), conf("A", 0, y))
        row += {"YES": "  #", "NO": "  .", "UNKNOWN": "  ?"}[v.outcome.name]
    print(f"x={x:<3}" + row)
