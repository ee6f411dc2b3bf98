"""
How accurate is the estimator?
==============================

A small version of the simulation study: draw samples over a grid of
(N, psi, rho), re-estimate, and look at the errors per number of subjects.
"""

import numpy as np

from gsd import SimDesign, accuracy_summary, fit_rho_prior, run_sim_study

design = SimDesign(n_values=(6, 24), psi_grid=tuple(np.linspace(1.5, 4.5, 4)),
                   rho_grid=tuple(np.linspace(0.1, 0.9, 4)), repetitions=10, seed=1)
records = run_sim_study(design)
print(len(records), "fits")

summary = accuracy_summary(records)
for n, entry in summary.items():
    lo_psi, hi_psi = entry["band_psi"]
    lo_rho, hi_rho = entry["band_rho"]
    print(f"N={n:2d}: psi error 95% band [{lo_psi:+.2f}, {hi_psi:+.2f}], "
          f"rho error 95% band [{lo_rho:+.2f}, {hi_rho:+.2f}]")

# mean error against the true rho at the smallest N
for rho, stats in summary[6]["by_true_rho"].items():
    print(f"N=6, rho={rho:.2f}: bias {stats['bias_rho']:+.3f}")

# the spread of fitted rho values over many items gives a prior for rho
est = [r.est_rho for r in records if r.n == 24]
prior = fit_rho_prior(est)
print(f"rho prior from the N=24 fits: mu={prior.mu:.3f} sigma={prior.sigma:.3f}")
