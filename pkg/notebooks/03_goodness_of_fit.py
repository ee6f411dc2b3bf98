"""
Goodness of fit over many items
===============================

Each item gets a chi-squared p-value per model.  If a model is right, about
5% of items fall below 0.05; the global binomial test asks whether the
observed share is plausibly that small.
"""

import numpy as np

from gsd import Dataset, GsdParams, gsd_sample, pvalue_histogram, run_batch

rng = np.random.default_rng(3)
n_items = 200
psis = rng.uniform(1.3, 4.7, n_items)
rhos = np.clip(rng.normal(0.86, 0.071, n_items), 1e-4, 1.0)
items = [gsd_sample(GsdParams(p, r), 24, seed=i, id=f"item{i:03d}")
         for i, (p, r) in enumerate(zip(psis, rhos))]

report = run_batch(Dataset(items), alpha=0.05)
for model, section in report.global_tests.items():
    print(f"{model:8s} below 0.05: {section['fraction_below_alpha']:.3f}   global p = {section['p_value']:.3g}")

# p-value histograms, ten bins over [0, 1]
for model in ("GSD", "Normal"):
    pvalues = [r.p_value for r in report.rows if r.model == model and r.p_value is not None]
    print(model, pvalue_histogram(pvalues, 10).tolist())

# one row of the per-item table
first = [r for r in report.rows if r.id == "item000"]
for row in first:
    print(row.model, round(row.psi_hat, 3), round(row.rho_or_sigma_hat, 3), round(row.p_value, 4), row.flags)
