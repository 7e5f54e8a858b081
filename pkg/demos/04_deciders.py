"""Boundedness, termination and differential checks on random models.

Each verdict is either conclusive with a replayable witness, or UNKNOWN
when the exploration caps were hit.

    python demos/04_deciders.py
"""

from collections import Counter
from pathlib import Path

from tvass import Options, bounded, conf, parse_model, print_model, random_instance, terminates
from tvass.decide import compute_Dx, conjectured_threshold, find_increasing_cycle

HERE = Path(__file__).parent
ex = parse_model((HERE / "ex.tvass").read_text())

v = bounded(ex, conf("A", 3, 5))
print("EX from A(3,5):", v.label)
print("    prefix", " ".join(v.certificate.prefix))
print("    pump  ", " ".join(v.certificate.pump))
print("    terminates:", terminates(ex, conf("A", 3, 5)).label)

cyc = find_increasing_cycle(ex, "A")
print(f"increasing vertical loop at h={cyc.h}, gain {cyc.m}: {' '.join(cyc.beta)}")
sets = [compute_Dx(ex, "A", x, 12).members for x in range(8)]
for x, d in enumerate(sets):
    print(f"    D_{x} = {sorted(d)}")
print("    sets stop changing from x =", conjectured_threshold(sets), "(observed, not proved)")

print()
model = random_instance(seed=7, num_states=3, max_norm=2, test_density=0.3)
print(print_model(model))
opts = Options(cap_norm=40, cap_steps=20_000)
tally = Counter()
for seed in range(200):
    m = random_instance(seed, 3, 2, 0.25)
    src = conf(m.states[0], 1, 1)
    tally[bounded(m, src, opts).label, terminates(m, src, opts).label] += 1
print("verdicts over 200 random 3-state models from (1,1):")
for (b, t), n in tally.most_common():
    print(f"    {b:10} {t:15} {n}")
