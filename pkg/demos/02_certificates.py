"""Reachability answers that come with linear path scheme certificates.

A YES from ``reach`` carries a counted scheme: a few fixed paths and cycles,
each cycle repeated some number of times.  The certificate replays without
trusting the solver, and its inequality system explains every count.

    python demos/02_certificates.py
"""

import json
from pathlib import Path

from tvass import build_system, check_certificate, conf, lps_reach, parse_model, reach
from tvass.formats import certificate_from_json

HERE = Path(__file__).parent
ex = parse_model((HERE / "ex.tvass").read_text())
src = conf("A", 3, 5)

for k in range(4):
    dst = conf("A", 3 + 2 * k, 5)
    v = reach(ex, src, dst)
    cert = v.certificate
    print(f"{src} ->* {dst}: {v.label}")
    print(f"    scheme {cert.scheme}")
    print(f"    counts {cert.counts}, replay ok: {check_certificate(ex, src, dst, cert)}")

# a hand-written certificate, stored as JSON next to this script
cert = certificate_from_json((HERE / "lps.json").read_text())
dst = conf("A", 7, 5)
print()
print("lps.json:", cert.scheme, cert.counts, "valid:", check_certificate(ex, src, dst, cert))

system = build_system(ex, cert.scheme, src.counters, dst.counters)
print(f"its system has {len(system.rows)} rows over {system.num_vars} counts:")
for row in system.rows[-4:]:
    print(f"    {row.coeffs} >= {row.const}   ({row.tag})")

# the solver rediscovers counts for the same scheme, and refutes an impossible target
print("lps_reach to A(7,5):", lps_reach(ex, cert.scheme, (3, 5), (7, 5)))
print("lps_reach to A(4,5):", lps_reach(ex, cert.scheme, (3, 5), (4, 5)))
print(json.dumps(reach(ex, src, conf("A", 5, 5)).to_json()["certificate"], indent=None))
