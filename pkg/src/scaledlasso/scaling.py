"""Empirical expansion of the LASSO fit and its degrees of freedom.

The LASSO output ``mu`` is multiplied by

    alpha = (mu'y + delta) / (||mu||^2 + delta)

which is at least 1 off the path knots, so it undoes part of the shrinkage
toward zero.  ``delta > 0`` only keeps the ratio finite when ``mu = 0``; it
defaults to ``1/n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import DesignMatrix, as_array
from .exceptions import AtTransitionPoint, ConfigError, EmptyActiveSet
from .path import LassoFit


@dataclass(frozen=True)
class ScalingConfig:
    """``delta`` stabilizes the expansion factor; ``None`` means ``1/n``."""

    delta: float | None = None

    def __post_init__(self):
        if self.delta is not None and not (np.isfinite(self.delta) and self.delta > 0):
            raise ConfigError(f"delta must be positive, got {self.delta!r}")

    def value(self, n: int) -> float:
        """``delta`` for a sample of size ``n``."""
        return 1.0 / n if self.delta is None else float(self.delta)

    @classmethod
    def for_samples(cls, n: int) -> "ScalingConfig":
        return cls(delta=1.0 / n)


@dataclass(frozen=True, eq=False)
class ScaledFit:
    base: LassoFit
    alpha_hat: float
    mu_scaled: np.ndarray
    d1: float
    d2: float
    residual_gap: float

    @property
    def divergence(self) -> float:
        """``d1 + d2``, the divergence of ``y -> alpha_hat * mu``."""
        return self.d1 + self.d2

    @property
    def beta_scaled(self) -> np.ndarray:
        return self.alpha_hat * self.base.beta


def _require_off_knot(fit: LassoFit, allow_knot: bool = False):
    if fit.at_transition and not allow_knot:
        raise AtTransitionPoint(f"fit at lambda={fit.lam!r} sits on a transition point")


def empirical_alpha(fit: LassoFit, y, cfg: ScalingConfig) -> float:
    y = np.asarray(y, dtype=float)
    mu = fit.mu
    delta = cfg.value(mu.size)
    return float((mu @ y + delta) / (mu @ mu + delta))


def empirical_alpha_l1(fit: LassoFit, cfg: ScalingConfig) -> float:
    """Same factor written as ``1 + lam ||beta||_1 / (||mu||^2 + delta)``.

    Valid only off the knots, where the LASSO stationarity conditions make
    ``mu'y = ||mu||^2 + lam ||beta||_1``.
    """
    mu = fit.mu
    return float(1.0 + fit.lam * fit.l1_norm / (mu @ mu + cfg.value(mu.size)))


def scaled_output(fit: LassoFit, alpha: float) -> np.ndarray:
    return float(alpha) * fit.mu


def residual_gap(fit: LassoFit, y, cfg: ScalingConfig, *, allow_knot: bool = False) -> float:
    """Drop in residual sum of squares obtained by the expansion.

    ``(1 - alpha)^2 (||mu||^2 + 2 delta)``, which equals
    ``||y - mu||^2 - ||y - alpha mu||^2`` off the knots.
    """
    _require_off_knot(fit, allow_knot)
    alpha = empirical_alpha(fit, y, cfg)
    mu2 = fit.mu @ fit.mu
    return float((1.0 - alpha) ** 2 * (mu2 + 2.0 * cfg.value(fit.mu.size)))


def unstabilized_gap(fit: LassoFit) -> float:
    """Residual gap with ``delta = 0``: ``lam^2 ||beta||_1^2 / ||mu||^2``."""
    if fit.k_active == 0:
        raise EmptyActiveSet("gap undefined for an empty fit")
    mu2 = fit.mu @ fit.mu
    return float(fit.lam**2 * fit.l1_norm**2 / mu2)


def eigen_bounds(X, lam: float, fit: LassoFit | None = None):
    """Bounds ``(lam^2/(n rho_max), lam^2 m^2/(n rho_min))`` on the delta=0 gap.

    ``rho_min`` and ``rho_max`` are the extreme eigenvalues of ``X'X/n``.
    """
    if fit is not None and fit.k_active == 0:
        raise EmptyActiveSet("bounds need a non-empty active set")
    if not isinstance(X, DesignMatrix):
        X = DesignMatrix(as_array(X))
    n, m = X.shape
    lower = lam**2 / (n * X.rho_max)
    upper = lam**2 * m**2 / (n * X.rho_min)
    return float(lower), float(upper)


def expansion_bound(X, lam: float, cfg: ScalingConfig) -> float:
    """Upper bound ``max(1/delta, m^2/rho_min) lam / sqrt(n)`` on ``E[alpha - 1]``."""
    if not isinstance(X, DesignMatrix):
        X = DesignMatrix(as_array(X))
    n, m = X.shape
    return float(max(1.0 / cfg.value(n), m**2 / X.rho_min) * lam / np.sqrt(n))


def df_terms(fit: LassoFit, y, cfg: ScalingConfig, *, allow_knot: bool = False):
    """Divergence of ``y -> alpha(y) mu(y)`` split as ``(d1, d2)``.

    ``d1 = (1 - alpha)(||mu||^2 - delta)/(||mu||^2 + delta)`` comes from the
    dependence of ``alpha`` on ``y``; ``d2 = alpha * k`` from that of ``mu``.
    """
    _require_off_knot(fit, allow_knot)
    alpha = empirical_alpha(fit, y, cfg)
    mu2 = fit.mu @ fit.mu
    delta = cfg.value(fit.mu.size)
    d1 = (1.0 - alpha) * (mu2 - delta) / (mu2 + delta)
    d2 = alpha * fit.k_active
    return float(d1), float(d2)


def scale_fit(
    fit: LassoFit, y, cfg: ScalingConfig, alpha: float | None = None, *, allow_knot: bool = False
) -> ScaledFit:
    """Bundle the expansion factor, scaled output and divergence terms.

    Passing ``alpha`` overrides the empirical factor (``alpha=1`` gives back
    plain LASSO with ``d1 = 0`` and ``d2 = k``).
    """
    _require_off_knot(fit, allow_knot)
    y = np.asarray(y, dtype=float)
    if alpha is None:
        a = empirical_alpha(fit, y, cfg)
        d1, d2 = df_terms(fit, y, cfg, allow_knot=allow_knot)
    else:
        a = float(alpha)
        d1, d2 = 0.0, a * fit.k_active
    mu2 = fit.mu @ fit.mu
    return ScaledFit(
        base=fit,
        alpha_hat=a,
        mu_scaled=scaled_output(fit, a),
        d1=d1,
        d2=d2,
        residual_gap=float((1.0 - a) ** 2 * (mu2 + 2.0 * cfg.value(fit.mu.size))),
    )
