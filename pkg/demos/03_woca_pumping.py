"""From two counters to one counter with weights, then pumping.

Counter 2 of the example model is never tested, so it can be folded into a
weight: the result is a weighted one-counter automaton whose runs between
counter-1 zeros accumulate exactly the change of counter 2.

    python demos/03_woca_pumping.py
"""

from pathlib import Path

from tvass import apply_trace, conf, parse_model
from tvass.woca import cut_short_cycles, hill_cut, lps_weight_certificate, short_run, tvass_to_woca, weight

HERE = Path(__file__).parent
ex = parse_model((HERE / "ex.tvass").read_text())
w, tmap = tvass_to_woca(ex)
print(f"weighted automaton: {w.num_states} states, {len(w.base.transitions)} unit steps")
for tid, chain in tmap.chains.items():
    print(f"    {tid:4} -> {' '.join(chain)}")

pi0 = ["dAB", "dBB", "dBB", "dBA", "dAA"]
image = tmap.to_woca(pi0)
print("image of pi0:", len(image), "steps, weight", weight(w, image))
print("A(0) -image->", apply_trace(w.base, conf("A", 0), image))

# the extractors need |run| >= 2|Q|^3 = 1458 here, so repeat the image
run = image * (2 * w.num_states**3 // len(image) + 1)
print("pumping run:", len(run), "steps")
f = hill_cut(w, "A", run, 1)
print()
print(f"hill cut ({'low' if f.low else 'hill'} case) anchors r={f.r} s={f.s}, levels {f.levels}")
for n in range(4):
    pumped = f.pump([n])
    print(f"    n={n}: {len(pumped):3} steps, weight {weight(w, pumped):+d}, ends {apply_trace(w.base, conf('A', 0), pumped)}")
g = cut_short_cycles(w, "A", run)
print(f"short cycles at level x={g.x}, d={g.d}: |beta|={len(g.beta)}, |theta|={len(g.theta)}")

print()
print("shortest run B(0) -> A(0):", short_run(w, "B", 0, "A", 0))
cert = lps_weight_certificate(w, "A", "A", 6)
print(f"weight 6 certificate: |alpha|={len(cert.alpha)}, |beta|={len(cert.beta)}, n={cert.n}")
print("  as a two-counter trace:", tmap.to_tvass(cert.trace()))
