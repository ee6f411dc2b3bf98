"""
Fitting one rated item
======================

Estimate psi and rho from the answers of one item, first by moments and
then by maximum likelihood, and compare with the quantized Normal.
"""

from gsd import (
    GsdParams,
    fit_gsd_mle,
    fit_gsd_moments,
    fit_normal_moments,
    fit_qnormal_mle,
    gsd_sample,
)

truth = GsdParams(2.85, 0.8)
sample = gsd_sample(truth, 48, seed=7)
print("counts:", sample.counts.tolist())

# moments: the mean gives psi, the variance law inverted gives rho
mom = fit_gsd_moments(sample)
print(f"moments:  psi={mom.psi:.3f}  rho={mom.rho:.3f}")

# maximum likelihood, started from the moment estimate and a coarse grid
fit = fit_gsd_mle(sample)
print(f"MLE:      psi={fit.params.psi:.3f}  rho={fit.params.rho:.3f}  "
      f"loglik={fit.log_likelihood:.3f}  converged={fit.converged}")
print(f"truth:    psi={truth.psi}  rho={truth.rho}")

# the two Normal variants: rounded and censored Normal fitted by MLE, and
# the plain sample mean and standard deviation
qn = fit_qnormal_mle(sample)
nm = fit_normal_moments(sample)
print(f"QNormal:  psi_o={qn.params.psi_o:.3f}  sigma_o={qn.params.sigma_o:.3f}  loglik={qn.log_likelihood:.3f}")
print(f"Normal:   psi_o={nm.psi_o:.3f}  sigma_o={nm.sigma_o:.3f}")
