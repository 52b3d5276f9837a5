"""How close are uniform bounds to the truth for sums of random signs?

Prints the exact Kolmogorov distance next to several upper bounds."""

import math

from artifact import bounds_clt as bc
from artifact import cf, harness, lattice
from artifact.special import INV_SQRT2PI

normal = cf.cf_catalog("normal")
print(f"{'n':>4} {'exact':>9} {'structured':>11} {'feller':>9} {'prawitz':>9}")
for n in (1, 2, 5, 10, 20, 50, 100):
    S = harness.sym_bernoulli_sum(n)
    exact = lattice.kolmogorov_distance(S)
    best = bc.berry_esseen_uniform(bc.MomentProfile.iid(1.0, 1.0, n)).value
    f = cf.lattice_cf(S)
    feller = cf.feller_bound(f, normal, INV_SQRT2PI, 10.0, 2.0)
    prawitz = cf.prawitz_rho_bound(f, 10.0, 0.5)
    print(f"{n:4d} {exact:9.5f} {best:11.5f} {feller:9.5f} {prawitz:9.5f}")

# the exact distance times sqrt(2 pi n) creeps up to 1 from below
print("sqrt(2 pi n) * exact at n=199:", math.sqrt(2 * math.pi * 199) * bc.hipp_mattner(199))
