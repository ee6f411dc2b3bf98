"""
What rounding does to a Normal
==============================

A Normal opinion rounded to 1..5, with the tails piled onto the end
categories, no longer has the mean or variance it started with.
"""

import numpy as np

from gsd import NormalParams, discretization_map, mean_curve, qnormal_pmf, variance_ceiling_map

print("PMF for psi_o=3, sigma_o=1:", np.round(qnormal_pmf(NormalParams(3.0, 1.0)), 4))

grid = np.linspace(1, 5, 9)
for sigma in (0.5, 1.0, 2.0):
    psi_u, sigma_u_sq = mean_curve(grid, sigma)
    print(f"sigma_o={sigma}: psi_u =", " ".join(f"{v:.3f}" for v in psi_u))

# censoring pulls the ends inward
m = discretization_map(NormalParams(1.0, 1.0))
print(f"\npsi_o=1, sigma_o=1 -> psi_u={m.psi_u:.3f}, sigma_u^2={m.sigma_u_sq:.3f}")

# give the Normal the largest variance a 1..5 score can have: the rounded
# version still falls short of it
ceiling = variance_ceiling_map(grid)
for psi_o, s in zip(grid, ceiling):
    print(f"psi_o={psi_o:.1f}: V_max={(psi_o - 1) * (5 - psi_o):.2f}  sigma_u^2={s:.3f}")
