from fractions import Fraction

import numpy as np
import pytest

import oracles
from scaledlasso import (
    AtTransitionPoint,
    ConfigError,
    DesignMatrix,
    EmptyActiveSet,
    ScalingConfig,
    df_terms,
    eigen_bounds,
    empirical_alpha,
    empirical_alpha_l1,
    expansion_bound,
    fit_from_coefficients,
    lars_lasso_path,
    residual_gap,
    scale_fit,
    scaled_output,
    solve_at,
    solve_at_knot,
    unstabilized_gap,
)

# one-dimensional example at lam = 1 with delta = 1/10, in exact arithmetic:
# mu = (1/2, 1/2), mu'y = 1, ||mu||^2 = 1/2
DELTA = Fraction(1, 10)
ALPHA = (1 + DELTA) / (Fraction(1, 2) + DELTA)  # 11/6
GAP = (1 - ALPHA) ** 2 * (Fraction(1, 2) + 2 * DELTA)
D1 = (1 - ALPHA) * (Fraction(1, 2) - DELTA) / (Fraction(1, 2) + DELTA)
D2 = ALPHA


@pytest.fixture
def one_d_fit(one_d):
    X, y = one_d
    return solve_at(lars_lasso_path(X, y), X, y, 1.0), y


def test_frozen_one_d_values():
    assert float(ALPHA) == pytest.approx(1.8333333333333333)
    assert float(GAP) == pytest.approx(0.48611, abs=5e-6)
    assert float(D1) == pytest.approx(-0.5556, abs=5e-5)


def test_one_d_alpha_both_forms(one_d_fit):
    fit, y = one_d_fit
    cfg = ScalingConfig(0.1)
    assert empirical_alpha(fit, y, cfg) == pytest.approx(float(ALPHA), rel=1e-15)
    assert empirical_alpha_l1(fit, cfg) == pytest.approx(float(ALPHA), rel=1e-15)


def test_one_d_scaled_output(one_d_fit):
    fit, _ = one_d_fit
    np.testing.assert_allclose(scaled_output(fit, float(ALPHA)), [float(ALPHA) / 2] * 2, rtol=1e-15)
    np.testing.assert_array_equal(scaled_output(fit, 1.0), fit.mu)
    np.testing.assert_array_equal(scaled_output(fit, 0.0), 0.0)


def test_one_d_gap_both_ways(one_d_fit):
    fit, y = one_d_fit
    cfg = ScalingConfig(0.1)
    gap = residual_gap(fit, y, cfg)
    assert gap == pytest.approx(float(GAP), rel=1e-14)
    direct = np.sum((y - fit.mu) ** 2) - np.sum((y - empirical_alpha(fit, y, cfg) * fit.mu) ** 2)
    assert direct == pytest.approx(float(GAP), rel=1e-14)


def test_one_d_df_terms(one_d_fit):
    fit, y = one_d_fit
    d1, d2 = df_terms(fit, y, ScalingConfig(0.1))
    assert d1 == pytest.approx(float(D1), rel=1e-14)
    assert d2 == pytest.approx(float(D2), rel=1e-14)


def test_zero_fit_has_unit_alpha(rng):
    X, y = oracles.random_instance(rng)
    fit = fit_from_coefficients(X, y, np.zeros(X.shape[1]), 1e9)
    cfg = ScalingConfig(0.1)
    assert empirical_alpha(fit, y, cfg) == 1.0
    assert residual_gap(fit, y, cfg) == 0.0
    assert df_terms(fit, y, cfg) == (0.0, 0.0)


def test_least_squares_fit_has_unit_alpha(rng):
    X = rng.standard_normal((30, 4))
    y = rng.standard_normal(30)
    fit = solve_at(lars_lasso_path(X, y), X, y, 0.0)
    cfg = ScalingConfig(1e-6)
    assert empirical_alpha(fit, y, cfg) == pytest.approx(1.0, abs=1e-12)
    assert residual_gap(fit, y, cfg) == pytest.approx(0.0, abs=1e-20)
    d1, d2 = df_terms(fit, y, cfg)
    assert d1 == pytest.approx(0.0, abs=1e-12)
    assert d2 == pytest.approx(4.0, abs=1e-11)


def test_scaled_fit_invariants(rng):
    for _ in range(10):
        X, y = oracles.random_instance(rng)
        path = lars_lasso_path(X, y)
        cfg = ScalingConfig(1.0 / X.shape[0])
        for lam in oracles.interior_lambdas(path, 3, rng):
            sc = scale_fit(solve_at(path, X, y, lam), y, cfg)
            assert sc.alpha_hat >= 1.0
            np.testing.assert_array_equal(sc.mu_scaled, sc.alpha_hat * sc.base.mu)
            assert abs(sc.d1) <= sc.alpha_hat - 1.0 + 1e-15
            assert sc.d2 == sc.alpha_hat * sc.base.k_active
            assert sc.divergence == sc.d1 + sc.d2


def test_alpha_override_reduces_to_plain(one_d_fit):
    fit, y = one_d_fit
    sc = scale_fit(fit, y, ScalingConfig(0.1), alpha=1.0)
    assert (sc.d1, sc.d2, sc.residual_gap) == (0.0, 1.0, 0.0)


def test_knot_fits_need_permission(rng):
    X, y = oracles.random_instance(rng)
    path = lars_lasso_path(X, y)
    fit = solve_at_knot(path, X, y, 1)
    cfg = ScalingConfig(0.1)
    with pytest.raises(AtTransitionPoint):
        scale_fit(fit, y, cfg)
    with pytest.raises(AtTransitionPoint):
        df_terms(fit, y, cfg)
    assert scale_fit(fit, y, cfg, allow_knot=True).alpha_hat >= 1.0


def test_single_column_gap_hits_lower_bound():
    n = 10
    x = np.linspace(-1, 1, n)
    x = (x - x.mean()) / np.sqrt(np.mean((x - x.mean()) ** 2))  # x'x = n
    y = 3 * x + np.cos(np.arange(n))
    X = x[:, None]
    path = lars_lasso_path(X, y)
    lam = 0.5 * path.lambda_max
    fit = solve_at(path, X, y, lam)
    lo, hi = eigen_bounds(DesignMatrix(X), lam, fit)
    assert unstabilized_gap(fit) == pytest.approx(lam**2 / n, rel=1e-12)
    assert lo == pytest.approx(lam**2 / n, rel=1e-12)
    assert hi == pytest.approx(lam**2 / n, rel=1e-12)


def test_eigen_bounds_contain_gap(rng):
    X = rng.standard_normal((50, 5))
    y = X @ [1.0, -1, 0.5, 0, 0] + rng.standard_normal(50)
    path = lars_lasso_path(X, y)
    for lam in oracles.interior_lambdas(path, 10, rng):
        fit = solve_at(path, X, y, lam)
        if fit.k_active == 0:
            continue
        lo, hi = eigen_bounds(X, lam, fit)
        assert lo <= unstabilized_gap(fit) <= hi
    assert eigen_bounds(X, 0.0) == (0.0, 0.0)


def test_empty_fit_has_no_bounds(rng):
    X, y = oracles.random_instance(rng)
    fit = fit_from_coefficients(X, y, np.zeros(X.shape[1]), 1e9)
    with pytest.raises(EmptyActiveSet):
        eigen_bounds(X, 1.0, fit)
    with pytest.raises(EmptyActiveSet):
        unstabilized_gap(fit)


def test_expansion_bound_formula(rng):
    X = rng.standard_normal((40, 3))
    d = DesignMatrix(X)
    cfg = ScalingConfig(0.05)
    expected = max(20.0, 9 / d.rho_min) * 2.0 / np.sqrt(40)
    assert expansion_bound(X, 2.0, cfg) == pytest.approx(expected)


@pytest.mark.parametrize("delta", [0.0, -1.0, float("nan")])
def test_delta_must_be_positive(delta):
    with pytest.raises(ConfigError):
        ScalingConfig(delta)


def test_default_delta_is_one_over_n(one_d_fit):
    fit, y = one_d_fit
    assert ScalingConfig().value(2) == 0.5
    # mu'y = 1, ||mu||^2 = 1/2 with delta = 1/2
    assert empirical_alpha(fit, y, ScalingConfig()) == pytest.approx(1.5)
