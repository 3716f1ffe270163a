"""No-arbitrage and local-martingale-measure verdicts for the catalog.

Run: python demos/04_verdicts.py
"""
import math

from gendiff.characteristics import builtin
from gendiff.verdict import na_verdict

CASES = [
    ("brownian", 0.0), ("sticky_bm", 0.0), ("skew_bm", 0.0), ("absorbed_ito", 1.0),
    ("counterexample_nondc", 1.0), ("counterexample_nondc", 0.0), ("counterexample_reflecting", 1.0),
]

print(f"{'model':28s} {'x0':>4s} {'T':>4s}  {'NA':8s} {'ACLMM':10s} certificate")
for name, x0 in CASES:
    for horizon in (1.0, math.inf):
        v = na_verdict(builtin(name), x0, horizon)
        cert = type(v.certificate).__name__ if v.certificate else "-"
        print(f"{name:28s} {x0:4.1f} {horizon:4.0f}  {v.na:8s} {v.aclmm:10s} {cert}")

print("\nrule trace for the reflecting model:")
for step in na_verdict(builtin("counterexample_reflecting"), 1.0, 1.0).rule_trace:
    print("  ", step)
