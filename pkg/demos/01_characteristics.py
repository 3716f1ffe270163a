"""Scale functions, speed measures and what they predict.

Run: python demos/01_characteristics.py
"""
from gendiff.characteristics import CATALOG, builtin, speed_mass


def exit_probability(model, x, a, b):
    s = model.scale
    return float((s(x) - s(a)) / (s(b) - s(a)))


for name in CATALOG:
    print(f"{name:28s} {builtin(name).summary()['scale']}")

print()
for alpha in (0.2, 0.3, 0.8):
    m = builtin("skew_bm", alpha=alpha)
    print(f"skew alpha={alpha}: P(leave (-1,1) at 1 | start 0) = {exit_probability(m, 0.0, -1.0, 1.0):.3f}")

# atoms add mass on top of Lebesgue length
m = builtin("counterexample_nondc")
print(f"\nspeed mass of [1/4, 1/2] in the non-dc model: {speed_mass(m.speed, 0.25, 0.5):.4f}")
print(f"sticky atom at 0 with rho=2: {builtin('sticky_bm', rho=2.0).speed.atoms}")
