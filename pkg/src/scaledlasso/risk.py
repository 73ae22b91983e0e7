"""SURE criteria for plain and scaled LASSO, noise-variance estimation and lambda selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import as_array
from .exceptions import ConfigError, EmptyCandidateSet, InputError
from .path import LassoPath, solve_at
from .scaling import ScaledFit, ScalingConfig, scale_fit

CRITERIA = ("plain", "scaled")


@dataclass(frozen=True)
class SureReport:
    lam: float
    rss_plain: float
    rss_scaled: float
    k_active: int
    alpha_hat: float
    d1: float
    d2: float
    sure_plain: float
    sure_scaled: float
    sigma2_used: float

    def criterion(self, name: str) -> float:
        if name == "plain":
            return self.sure_plain
        if name == "scaled":
            return self.sure_scaled
        raise ConfigError(f"unknown criterion {name!r}")


@dataclass(frozen=True)
class NoiseEstimate:
    sigma2: float
    gamma: float


def sure_lasso(fit, y, sigma2: float) -> float:
    """``-sigma2 + ||mu - y||^2/n + 2 sigma2 k/n``."""
    y = np.asarray(y, dtype=float)
    n = y.size
    r = fit.mu - y
    return float(-sigma2 + (r @ r) / n + 2.0 * sigma2 * fit.k_active / n)


def sure_lasso_scaled(scaled: ScaledFit, y, sigma2: float) -> float:
    """``-sigma2 + ||y - alpha mu||^2/n + 2 sigma2 (d1 + d2)/n``."""
    y = np.asarray(y, dtype=float)
    n = y.size
    r = y - scaled.mu_scaled
    return float(-sigma2 + (r @ r) / n + 2.0 * sigma2 * (scaled.d1 + scaled.d2) / n)


def noise_variance_ce(X, y, gamma: float = 1e-6) -> NoiseEstimate:
    """Ridge-smoothed residual variance ``y'(I-H)^2 y / tr[(I-H)^2]``.

    ``H = X (X'X + gamma I)^{-1} X'``.  Computed from a thin SVD of ``X`` so
    the near-singular Gaussian-basis designs need no explicit inverse.
    """
    if not gamma > 0:
        raise InputError("gamma must be positive")
    Xv = as_array(X)
    y = np.asarray(y, dtype=float)
    n = Xv.shape[0]
    U, s, _ = np.linalg.svd(Xv, full_matrices=False)
    # I - H has eigenvalue gamma/(s^2 + gamma) on range(X) and 1 on its complement
    shrink = gamma / (s**2 + gamma)
    proj = U.T @ y
    num = y @ y - proj @ proj + np.sum((shrink * proj) ** 2)
    den = n - s.size + np.sum(shrink**2)
    return NoiseEstimate(sigma2=float(max(num, 0.0) / den), gamma=float(gamma))


def sure_report(
    fit, y, sigma2: float, cfg: ScalingConfig, alpha: float | None = None, *, allow_knot: bool = False
) -> SureReport:
    """Both criteria at one fit; ``alpha`` fixes the expansion factor instead of estimating it."""
    y = np.asarray(y, dtype=float)
    sc = scale_fit(fit, y, cfg, alpha=alpha, allow_knot=allow_knot)
    r1 = y - fit.mu
    r2 = y - sc.mu_scaled
    return SureReport(
        lam=fit.lam,
        rss_plain=float(r1 @ r1),
        rss_scaled=float(r2 @ r2),
        k_active=fit.k_active,
        alpha_hat=sc.alpha_hat,
        d1=sc.d1,
        d2=sc.d2,
        sure_plain=sure_lasso(fit, y, sigma2),
        sure_scaled=sure_lasso_scaled(sc, y, sigma2),
        sigma2_used=float(sigma2),
    )


def log_grid(lo: float, hi: float, count: int) -> np.ndarray:
    """``count`` log-spaced values from ``hi`` down to ``lo``."""
    if not (0 < lo < hi) or count < 1:
        raise ConfigError("log grid needs 0 < lo < hi and count >= 1")
    return np.geomspace(hi, lo, count)


def candidate_lambdas(path: LassoPath, mode="midpoints") -> np.ndarray:
    """Segment midpoints of ``path`` or an explicit grid (any array-like)."""
    if isinstance(mode, str):
        if mode != "midpoints":
            raise ConfigError(f"unknown candidate mode {mode!r}")
        return path.midpoints()
    return np.sort(np.asarray(mode, dtype=float))[::-1]


def evaluate_candidates(path: LassoPath, X, y, lambdas, sigma2: float, cfg: ScalingConfig) -> list:
    return [sure_report(solve_at(path, X, y, lam), y, sigma2, cfg) for lam in lambdas]


def select_lambda(reports, criterion: str = "scaled"):
    """Candidate minimizing the criterion, ties going to the larger lambda.

    Returns ``(lam, index)`` with ``index`` into ``reports``.
    """
    reports = list(reports)
    if not reports:
        raise EmptyCandidateSet("no candidate lambdas")
    if criterion not in CRITERIA:
        raise ConfigError(f"criterion must be one of {CRITERIA}")
    values = np.array([r.criterion(criterion) for r in reports])
    best = values.min()
    tied = np.flatnonzero(values <= best + 1e-12 * abs(best))
    lams = np.array([reports[i].lam for i in tied])
    pick = int(tied[np.argmax(lams)])
    return reports[pick].lam, pick
