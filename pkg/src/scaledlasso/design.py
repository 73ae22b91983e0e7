"""Design-matrix standardization.

Every non-intercept column is centered and rescaled so that its squared
Euclidean norm equals ``n``.  The offsets and multipliers are kept so that
coefficients can be mapped back to the scale of the raw data.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import ConstantColumn, InputError, RankDeficient

#: smallest admissible eigenvalue of X'X/n before a design is called singular
RANK_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """A standardized n x m design.

    Attributes
    ----------
    values : ndarray, shape (n, m)
        Standardized columns.  When ``has_intercept`` is true, column 0 is the
        all-ones vector.
    has_intercept : bool
    column_means : ndarray, shape (m,)
        Offsets subtracted from the raw columns (0 for the intercept).
    column_scales : ndarray, shape (m,)
        Multipliers applied after centering (1 for the intercept).
    source_columns : tuple
        Raw column index for every column of ``values``; ``None`` marks an
        intercept that was added rather than taken from the raw matrix.
    """

    values: np.ndarray
    has_intercept: bool = False
    column_means: np.ndarray = field(default=None, repr=False)
    column_scales: np.ndarray = field(default=None, repr=False)
    source_columns: tuple = field(default=None, repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise InputError("design must be a 2-d array")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        m = values.shape[1]
        if self.column_means is None:
            object.__setattr__(self, "column_means", np.zeros(m))
        if self.column_scales is None:
            object.__setattr__(self, "column_scales", np.ones(m))
        if self.source_columns is None:
            object.__setattr__(self, "source_columns", tuple(range(m)))

    @property
    def shape(self):
        return self.values.shape

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    @cached_property
    def gram(self) -> np.ndarray:
        G = self.values.T @ self.values
        G.setflags(write=False)
        return G

    @cached_property
    def gram_eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues of X'X/n."""
        return np.linalg.eigvalsh(self.gram / self.n)

    @property
    def rho_min(self) -> float:
        return float(self.gram_eigenvalues[0])

    @property
    def rho_max(self) -> float:
        return float(self.gram_eigenvalues[-1])

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha1(np.ascontiguousarray(self.values).tobytes()).hexdigest()[:12]

    def to_original_scale(self, beta):
        """Map standardized-scale coefficients to the raw columns.

        Returns ``(offset, coef)`` where ``coef[i]`` multiplies raw column
        ``i`` and ``offset`` is the constant term, so that
        ``offset + raw @ coef`` equals ``values @ beta``.
        """
        beta = np.asarray(beta, dtype=float)
        n_raw = max((c for c in self.source_columns if c is not None), default=-1) + 1
        coef = np.zeros(n_raw)
        offset = 0.0
        for j, src in enumerate(self.source_columns):
            if self.has_intercept and j == 0:
                offset += beta[0]
                if src is not None:
                    # the intercept came from a raw all-ones column; report it as a constant
                    coef[src] = 0.0
                continue
            coef[src] = beta[j] * self.column_scales[j]
            offset -= beta[j] * self.column_scales[j] * self.column_means[j]
        return offset, coef


def as_array(X) -> np.ndarray:
    return X.values if isinstance(X, DesignMatrix) else np.asarray(X, dtype=float)


def _is_ones(col) -> bool:
    return bool(np.all(col == 1.0))


def standardize_design(raw, add_intercept: bool = False, rank_tol: float | None = RANK_TOL) -> DesignMatrix:
    """Center and scale the columns of ``raw``.

    Parameters
    ----------
    raw : array_like, shape (n, p)
    add_intercept : bool
        Put an all-ones column first.  An all-ones column already present in
        ``raw`` is used as the intercept instead of adding a second one.
    rank_tol : float or None
        Raise :class:`RankDeficient` when the smallest eigenvalue of X'X/n
        falls below this value.  ``None`` skips the check, which the
        Gaussian-basis simulations need (their Gram matrix is numerically
        singular for wide kernels).

    Raises
    ------
    ConstantColumn
        A non-intercept column has zero variance.
    RankDeficient
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 1:
        raw = raw[:, None]
    if raw.ndim != 2 or raw.shape[0] == 0 or raw.shape[1] == 0:
        raise InputError("design must be a non-empty 2-d array")
    if not np.all(np.isfinite(raw)):
        raise InputError("design contains non-finite entries")
    n, p = raw.shape

    ones_at = None
    if add_intercept:
        for i in range(p):
            if _is_ones(raw[:, i]):
                ones_at = i
                break

    cols, means, scales, sources = [], [], [], []
    if add_intercept:
        cols.append(np.ones(n))
        means.append(0.0)
        scales.append(1.0)
        sources.append(ones_at)
    for i in range(p):
        if i == ones_at:
            continue
        x = raw[:, i]
        mean = x.mean()
        centered = x - mean
        norm2 = centered @ centered
        if norm2 <= (1e-14 * max(1.0, np.abs(x).max())) ** 2 * n:
            raise ConstantColumn(f"column {i} has zero variance")
        scale = np.sqrt(n / norm2)
        cols.append(centered * scale)
        means.append(mean)
        scales.append(scale)
        sources.append(i)

    values = np.column_stack(cols)
    if values.shape[1] > n:
        raise RankDeficient(f"more columns ({values.shape[1]}) than samples ({n})")
    design = DesignMatrix(
        values,
        has_intercept=add_intercept,
        column_means=np.array(means),
        column_scales=np.array(scales),
        source_columns=tuple(sources),
    )
    if rank_tol is not None and design.rho_min < rank_tol:
        raise RankDeficient(f"X'X/n has smallest eigenvalue {design.rho_min:.3g}")
    return design
