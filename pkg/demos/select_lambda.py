"""Choose the penalty of a LASSO fit by minimizing SURE, with and without scaling.

A sparse linear model with correlated columns is fitted on its standardized
design; both criteria are evaluated at the midpoints of the LARS path.
"""

import numpy as np

from scaledlasso import (
    ScalingConfig,
    candidate_lambdas,
    evaluate_candidates,
    lars_lasso_path,
    noise_variance_ce,
    select_lambda,
    solve_at,
    standardize_design,
)

rng = np.random.default_rng(0)
n, m = 120, 15
cov = 0.6 ** np.abs(np.subtract.outer(np.arange(m), np.arange(m)))
X = rng.multivariate_normal(np.zeros(m), cov, size=n)
beta = np.zeros(m)
beta[[0, 4, 9]] = [3.0, -2.0, 1.5]
y = 1.0 + X @ beta + rng.standard_normal(n)

design = standardize_design(X, add_intercept=True)
path = lars_lasso_path(design, y)
sigma2 = noise_variance_ce(design, y).sigma2
print(f"estimated noise variance {sigma2:.3f} (true 1)")

reports = evaluate_candidates(path, design, y, candidate_lambdas(path), sigma2, ScalingConfig())
for crit in ("plain", "scaled"):
    lam, i = select_lambda(reports, crit)
    fit = solve_at(path, design, y, lam)
    alpha = reports[i].alpha_hat if crit == "scaled" else 1.0
    intercept, coef = design.to_original_scale(alpha * fit.beta)
    print(f"\n{crit}: lambda {lam:.3f}, {fit.k_active} active columns (intercept included), expansion {alpha:.4f}")
    print("  intercept", round(float(intercept), 3))
    print("  nonzero  ", {j: round(float(c), 3) for j, c in enumerate(coef) if c != 0.0})
