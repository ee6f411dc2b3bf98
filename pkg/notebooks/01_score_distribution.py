"""
The generalized score distribution
==================================

A look at how the two parameters shape the answers on a five-point scale:
psi moves the mean, rho trades spread for concentration.
"""

import numpy as np

from gsd import GsdParams, gsd_mean_variance, gsd_pmf, gsd_sample, variance_bounds

# for a given mean the variance can only move between two limits
for psi in (1.5, 2.6, 3.0, 4.2):
    b = variance_bounds(psi)
    print(f"psi={psi}: V_min={b.v_min:.3f}  V_bin={b.v_bin:.3f}  V_max={b.v_max:.3f}  C={b.c:.3f}")

# rho walks the variance linearly from V_max (rho -> 0) down to V_min (rho = 1)
psi = 2.6
print("\n k:      1      2      3      4      5   | mean   var")
for rho in (0.01, 0.4, 0.8, 0.9, 1.0):
    params = GsdParams(psi, rho)
    probs = gsd_pmf(params)
    mean, var = gsd_mean_variance(params)
    print(f"rho={rho:<4}", " ".join(f"{p:6.3f}" for p in probs), f"| {mean:.2f}  {var:.3f}")

# below C(psi) the law is a Beta-Binomial, above it a mix of the shifted
# Binomial and the tightest two-point law; at rho = C both give the Binomial
c = variance_bounds(psi).c
print("\nat rho = C:", np.round(gsd_pmf(GsdParams(psi, c)), 4))

# simulated answers of 24 subjects
sample = gsd_sample(GsdParams(3.4, 0.7), 24, seed=1)
print("\n24 answers:", sample.scores.tolist())
print("counts:", sample.counts.tolist(), " mean", round(sample.mean(), 3))
