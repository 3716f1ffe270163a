"""Which boundaries can the process reach, and what happens there.

Run: python demos/02_boundaries.py
"""
import numpy as np

from gendiff.boundary import classify_boundary, interior_point_accessibility
from gendiff.characteristics import builtin
from gendiff.regularity import companion_model

for name in ("brownian", "absorbed_ito", "counterexample_nondc", "counterexample_reflecting"):
    m = builtin(name)
    for side in ("lower", "upper"):
        c = classify_boundary(m, side, stipulate_absorbing=True)
        print(f"{name:28s} {side:5s} {c.accessibility:12s} {c.behavior}")

# after the change of measure the origin becomes an interior point nobody reaches
comp = companion_model(builtin("counterexample_nondc"), 1.0)
r = interior_point_accessibility(comp.speed, 0.0, "above", 1.0)
print(f"\norigin under the companion speed: {r.verdict}")
print("atom partial sums:", np.round(r.atom_partial_sums[:6], 4), "...", round(float(r.atom_partial_sums[29]), 4))
