"""Reference computations that share no code with the package.

They are slow and simple on purpose: a bound-constrained quadratic program
for the LASSO, brute-force grid search in one dimension and central finite
differences for divergences.
"""

import numpy as np
from scipy.optimize import minimize


def lasso_cost(X, y, b, lam):
    r = y - X @ b
    return 0.5 * r @ r + lam * np.abs(b).sum()


def lasso_qp(X, y, lam):
    """Half-quadratic LASSO through the split ``b = p - q`` with ``p, q >= 0``."""
    X = np.asarray(X, dtype=float)
    m = X.shape[1]
    G = X.T @ X
    c = X.T @ y

    def f(z):
        b = z[:m] - z[m:]
        g = G @ b - c
        val = 0.5 * b @ G @ b - c @ b + lam * z.sum()
        return val, np.concatenate([g + lam, -g + lam])

    res = minimize(
        f,
        np.zeros(2 * m),
        jac=True,
        method="L-BFGS-B",
        bounds=[(0, None)] * (2 * m),
        options={"ftol": 1e-16, "gtol": 1e-13, "maxiter": 50_000, "maxcor": 50},
    )
    return res.x[:m] - res.x[m:]


def grid_argmin_1d(fun, lo, hi, count=200_001):
    """Minimizer of a vectorized scalar function over an equispaced grid, and the grid step."""
    grid = np.linspace(lo, hi, count)
    vals = fun(grid)
    return grid[np.argmin(vals)], grid[1] - grid[0]


def fd_divergence(fn, y, h=1e-5):
    """``sum_i d fn(y)_i / d y_i`` by central differences."""
    y = np.asarray(y, dtype=float)
    total = 0.0
    for i in range(y.size):
        e = np.zeros_like(y)
        e[i] = h
        total += (fn(y + e)[i] - fn(y - e)[i]) / (2 * h)
    return total


def random_instance(rng, n_range=(20, 100), m_range=(2, 20)):
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(m_range[0], min(m_range[1], n) + 1))
    X = rng.standard_normal((n, m))
    beta = np.where(rng.random(m) < 0.5, rng.standard_normal(m) * 2, 0.0)
    y = X @ beta + rng.standard_normal(n)
    return X, y


def interior_lambdas(path, count, rng):
    """``count`` lambdas strictly inside random path segments, away from the knots."""
    segs = path.segments
    out = []
    for _ in range(count):
        s = segs[int(rng.integers(len(segs)))]
        w = rng.uniform(0.2, 0.8)
        out.append(s.lam_lo + w * (s.lam_hi - s.lam_lo))
    return out
