"""Tail probability of yearly claims when accidents come in groups.

Group sizes k = 1, 2, ... arrive as independent Poisson streams with daily
rate 2^-k, so the claim count is compound Poisson with geometric groups.
Claims have mean 2 and variance 1; E|X|^3 = 12."""

from artifact import bounds_rs as br

ins = br.insurance_tail_estimate(t=365, a=2.0, sigma2=1.0, beta3=12.0,
                                 rates=lambda k: 2.0 ** -k, threshold=1600.0)
print(f"mean of yearly total     {ins.mean:.1f}")
print(f"variance of yearly total {ins.variance:.1f}")
print(f"P(total > 1600) ~ {ins.estimate:.4f} +/- {ins.error_bound:.4f}")
print(f"guaranteed ceiling       {ins.ceiling:.4f}")
