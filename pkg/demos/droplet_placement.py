"""Where do droplets go?

Minimizes the periodic Coulomb interaction of n equal particles and reports
nearest-neighbour statistics. Two particles on the 2-D torus end up half a
period apart in both directions.
"""

from okas.interaction import lattice_report, optimize_positions

for d, cases in ((2, (2, 3, 4, 5, 6)), (3, (2, 3, 4))):
    print(f"--- {d}-D")
    for n in cases:
        res = optimize_positions(n, 1.0, d, restarts=20, seed=0)
        pair_sum = res.best_by_restart[-1]
        rep = lattice_report(res.positions, d)
        nn = ", ".join(f"{x:.4f}" for x in rep.nn_distances)
        print(f"n = {n}: interaction {pair_sum: .10f}  |grad| {res.gradient_norm:.1e}  "
              f"nn distances [{nn}]  cv {rep.cv:.2e}")
        if d == 2 and rep.angle_histogram is not None:
            print("       nn directions per 15 degrees:", rep.angle_histogram.tolist())
