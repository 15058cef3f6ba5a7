"""When does one droplet split?

3-D: a ball of volume m costs f(m); past m* two half balls are cheaper, and
e0(m) = min_n n f(m/n) jumps to n = 2. 2-D: the same question with the closed
form energy, followed by a brute-force check that unequal splits never win.
"""

import numpy as np

from okas.effective import (LONE_DROPLET_MASS, e0_2d_envelope, e0_conjectured, f_ball, m_star,
                            partition_bruteforce, split_threshold_2d)

ms = m_star(1.0)
print(f"m* (sigma = 1) = {ms:.6f}")
print(f"f(m*) = {f_ball(ms):.6f}, 2 f(m*/2) = {2 * f_ball(ms / 2):.6f}")
print("\n   m     e0(m)    n_opt")
for m in (1, 10, 20, 22, 23, 30, 60, 100, 200):
    value, n = e0_conjectured(m)
    print(f"{m:5g}  {value:9.4f}  {n:4d}")

sigma = 1 / 3
print(f"\n2-D, sigma = 1/3: one disk gives way to two at M = {split_threshold_2d(sigma):.4f}")
print(f"a droplet lighter than 2^(-2/3) pi = {LONE_DROPLET_MASS:.4f} never shares its mass")
for M in (1, 5, 20, 60):
    part = partition_bruteforce(M, sigma, perturbations=500, seed=0)
    print(f"M = {M:3d}: {part.n:2d} droplets of mass {part.masses[0]:.4f}, "
          f"best random rival loses by {part.min_margin:.2e}")

masses = np.linspace(0.5, 40, 80)
counts = [e0_2d_envelope(M, sigma)[1] for M in masses]
jumps = [f"{masses[i]:.1f}" for i in range(1, len(counts)) if counts[i] != counts[i - 1]]
print("2-D droplet count increases near M =", ", ".join(jumps))
