"""Cyclic coordinate descent for the half-quadratic LASSO.

Independent of the LARS path; used as the cross-check solver.
"""

import numpy as np

from .design import DesignMatrix
from .exceptions import InputError, MaxIterationsExceeded
from .path import LassoFit, _check_xy, fit_from_coefficients

MAX_SWEEPS = 100_000


def soft_threshold(z, t):
    """Proximal map of ``t * |.|``: ``sign(z) * max(|z| - t, 0)``."""
    return np.sign(z) * np.maximum(np.abs(z) - t, 0.0)


def coordinate_descent(
    X,
    y,
    lam: float,
    tol: float = 1e-10,
    *,
    penalize_intercept: bool = True,
    beta0=None,
    max_sweeps: int = MAX_SWEEPS,
) -> LassoFit:
    """Minimize ``(1/2)||y - X b||^2 + lam ||b||_1`` one coordinate at a time.

    Sweeps run over the columns in order until the largest coefficient
    change in a sweep is below ``tol``.  The gradient ``X'(y - Xb)`` is kept
    up to date through the Gram matrix, so a sweep costs O(m^2).

    Raises
    ------
    MaxIterationsExceeded
        No convergence within ``max_sweeps`` sweeps.
    """
    if not tol > 0:
        raise InputError("tol must be positive")
    if lam < 0:
        raise InputError("lambda must be nonnegative")
    Xv, y = _check_xy(X, y)
    m = Xv.shape[1]
    G = X.gram if isinstance(X, DesignMatrix) else Xv.T @ Xv
    diag = np.diag(G).copy()
    unpen = (0,) if (not penalize_intercept and isinstance(X, DesignMatrix) and X.has_intercept) else ()
    pen = np.full(m, float(lam))
    pen[list(unpen)] = 0.0

    beta = np.zeros(m) if beta0 is None else np.array(beta0, dtype=float)
    grad = Xv.T @ y - G @ beta  # X'(y - X beta)

    # plain Python floats in the inner loop are much faster than 0-d arrays
    b = beta.tolist()
    g = grad.tolist()
    d = diag.tolist()
    p = pen.tolist()
    rows = [G[j] for j in range(m)]
    for _ in range(max_sweeps):
        biggest = 0.0
        for j in range(m):
            z = g[j] + d[j] * b[j]
            if z > p[j]:
                new = (z - p[j]) / d[j]
            elif z < -p[j]:
                new = (z + p[j]) / d[j]
            else:
                new = 0.0
            step = new - b[j]
            if step != 0.0:
                b[j] = new
                grad -= step * rows[j]
                g = grad.tolist()
                if abs(step) > biggest:
                    biggest = abs(step)
        if biggest < tol:
            break
    else:
        raise MaxIterationsExceeded(f"coordinate descent did not converge in {max_sweeps} sweeps")

    return fit_from_coefficients(X, y, np.array(b), lam, unpenalized=unpen)
