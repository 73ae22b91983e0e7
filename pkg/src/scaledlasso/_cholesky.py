"""Upper Cholesky factor of an active-set Gram matrix, updated as columns enter and leave.

``R`` is upper triangular with ``G_AA = R.T @ R``.
"""

import numpy as np
from scipy.linalg import cholesky, solve_triangular

#: relative pivot (d^2 / G_jj) below which the factor is rebuilt from scratch
REFACTOR_TOL = 1e-10


def insert(R, g, g_jj):
    """Append one column to the factor.

    ``g`` holds the Gram entries between the new column and the current
    active columns, ``g_jj`` its squared norm.  Returns the new factor and the
    relative pivot ``d^2 / g_jj`` (the squared sine of the angle between the
    column and the active span); the factor is ``None`` when that is <= 0.
    """
    k = R.shape[0]
    if k == 0:
        if g_jj <= 0:
            return None, 0.0
        return np.array([[np.sqrt(g_jj)]]), 1.0
    w = solve_triangular(R, g, trans="T", lower=False)
    d2 = g_jj - w @ w
    rel = d2 / g_jj
    if d2 <= 0:
        return None, rel
    out = np.zeros((k + 1, k + 1))
    out[:k, :k] = R
    out[:k, k] = w
    out[k, k] = np.sqrt(d2)
    return out, rel


def delete(R, i):
    """Remove column/row ``i`` from the factored matrix using Givens rotations."""
    H = np.delete(R, i, axis=1)
    k = H.shape[1]
    for j in range(i, k):
        a, b = H[j, j], H[j + 1, j]
        r = np.hypot(a, b)
        if r == 0.0:
            continue
        c, s = a / r, b / r
        rows = H[[j, j + 1], j:]
        H[j, j:] = c * rows[0] + s * rows[1]
        H[j + 1, j:] = -s * rows[0] + c * rows[1]
        H[j + 1, j] = 0.0
    H = H[:k, :]
    neg = np.diag(H) < 0
    H[neg, :] *= -1.0
    return H


def refactor(G_AA):
    return cholesky(G_AA, lower=False)


def needs_refactor(R, G_AA) -> bool:
    if R.shape[0] == 0:
        return False
    return bool(np.min(np.diag(R) ** 2 / np.diag(G_AA)) < REFACTOR_TOL)


def solve(R, b):
    z = solve_triangular(R, b, trans="T", lower=False)
    return solve_triangular(R, z, lower=False)
