"""Smoothing a droplet with the optimal profile.

The diffuse interfacial energy of a mollified disk or sphere stays below
(sigma + alpha) times its perimeter, and its L1 distance to the sharp droplet
below C0(alpha) eps Per.
"""

import numpy as np

from okas.droplets import DropletConfiguration, mass_from_radius
from okas.grid import TorusGrid
from okas.wells import SIGMA, mollify_indicator

r = 0.2
for d, sizes in ((2, ((0.04, 128), (0.02, 256), (0.01, 512))), (3, ((0.04, 128), (0.02, 256)))):
    config = DropletConfiguration(d, [np.zeros(d)], [mass_from_radius(r, d)])
    print(f"--- {d}-D, radius {r}")
    print("   eps   energy/Per   L1/(eps Per)   C0(0.05)")
    for eps, n in sizes:
        res = mollify_indicator(config, TorusGrid(d, n), eps, alpha=0.05)
        print(f"  {eps:.2f}    {res.interfacial_energy / res.perimeter:.5f}      "
              f"{res.l1_distance / (eps * res.perimeter):.5f}       {res.c0:.4f}")
    print(f"  (sigma = {SIGMA:.5f}; energy/Per must stay below {SIGMA + 0.05:.5f})")
