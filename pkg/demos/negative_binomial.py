"""A negative binomial count is a Poisson number of logarithmic clusters.

Recovers the Poisson rate and the cluster law from the pmf alone, then
rebuilds the pmf and reports the largest discrepancy."""

import math

import numpy as np

from artifact import lattice

for r, p in ((1, 0.5), (2, 0.3), (0.5, 0.7)):
    nb = lattice.negative_binomial(r, p)
    dec = lattice.bdnc_decompose(nb)
    back = lattice.compound(lattice.poisson(dec.lambda_, 1e-15), dec.y_dist)
    _, _, (w1, w2) = lattice.aligned(back, nb)
    _, wy = dec.y_dist.atoms()
    print(f"r={r} p={p}: lambda={dec.lambda_:.6f} (r ln 1/p = {r * math.log(1 / p):.6f}), "
          f"P(Y=1..3)={np.round(wy[:3], 5)}, rebuild error {np.abs(w1 - w2).max():.1e}")

dec = lattice.bdnc_decompose(lattice.binomial(2, 0.5))
print("binomial(2, 0.5) infinitely divisible?", dec.is_bdnc, "smallest coefficient", round(dec.min_gamma, 4))
