"""Numerical test for the difference-of-convex property.

The slope variation of a dc function settles as the grid is refined; for the
non-dc scale it keeps growing.  Run: python demos/03_dc_check.py
"""
from gendiff.characteristics import builtin
from gendiff.regularity import InverseScale, dc_check

s = builtin("counterexample_nondc").scale
fwd = dc_check(s, (-0.5, 0.5), levels=12)
inv = dc_check(InverseScale(s), (float(s(-0.5)), float(s(0.5))), levels=12)

print(f"{'grid step':>12s} {'TV(scale)':>12s} {'TV(inverse)':>12s}")
for (h, a), (_, b) in zip(fwd.levels, inv.levels):
    print(f"{h:12.3e} {a:12.4f} {b:12.4f}")
print(f"\nscale: {fwd.verdict} (ratio {fwd.divergence_ratio:.3f}); inverse: {inv.verdict} (ratio {inv.divergence_ratio:.4f})")

print("\nskew scale:", dc_check(builtin("skew_bm", alpha=0.3).scale, (-1.0, 1.0), levels=8).verdict)
