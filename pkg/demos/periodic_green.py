"""Periodic Green's function on the unit torus.

Prints G at a few points, the self-interaction constant g(0) as the Ewald
cutoffs grow, and checks that -Laplace G = -1 away from the origin.
"""

import numpy as np

from okas.green import green_value, regular_part_at_zero, self_constant_report

for d in (2, 3):
    print(f"--- {d}-D torus")
    for x in ([0.5] * d, [0.25] + [0.0] * (d - 1), [0.1] * d):
        print(f"G({', '.join(f'{c:g}' for c in x)}) = {green_value(np.array(x), d): .12f}")
    print("g(0) under cutoff growth:")
    for real, recip, value, delta in self_constant_report(d):
        print(f"  real {real:2d}  recip {recip:2d}  {value: .15f}  change {delta: .1e}")

    h = 1e-3
    x = np.full(d, 0.3)
    lap = sum(green_value(x + h * e, d) + green_value(x - h * e, d) for e in np.eye(d))
    lap = (lap - 2 * d * green_value(x, d)) / h**2
    print(f"-Laplace G at {x.tolist()}: {-lap:.6f} (background charge -1)")

print(f"\ng(0) in 2-D and 3-D: {regular_part_at_zero(2):.10f}, {regular_part_at_zero(3):.10f}")
