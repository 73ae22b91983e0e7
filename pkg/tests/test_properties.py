"""Randomized invariants over generated instances."""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import oracles
from scaledlasso import (
    ScalingConfig,
    coordinate_descent,
    hat_quantities,
    kkt_check,
    lars_lasso_path,
    scale_fit,
    solve_at,
    standardize_design,
    sure_report,
)

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def instances(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(5, 60))
    m = draw(st.integers(1, min(n, 12)))
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, m))
    y = X @ np.where(rng.random(m) < 0.5, rng.standard_normal(m), 0.0) + rng.standard_normal(n)
    w = draw(st.floats(0.1, 0.9))
    return X, y, rng, w


def _interior_fit(X, y, w, rng):
    path = lars_lasso_path(X, y)
    seg = path.segments[int(rng.integers(len(path.segments)))]
    lam = seg.lam_lo + w * (seg.lam_hi - seg.lam_lo)
    return path, solve_at(path, X, y, lam)


@SETTINGS
@given(instances())
def test_fit_invariants(inst):
    X, y, rng, w = inst
    _, fit = _interior_fit(X, y, w, rng)
    assert np.all(fit.beta_active != 0)
    np.testing.assert_array_equal(np.sign(fit.beta_active), fit.signs)
    assert kkt_check(fit, X, y).ok


@SETTINGS
@given(instances())
def test_lemma_identities(inst):
    X, y, rng, w = inst
    _, fit = _interior_fit(X, y, w, rng)
    if fit.k_active == 0:
        return
    h = hat_quantities(fit, X, y)
    mu, lam, l1 = fit.mu, fit.lam, fit.l1_norm
    mu2 = mu @ mu
    scale = max(mu2, mu @ y, lam * l1, 1e-300)
    assert abs(mu @ h.q - l1) <= 1e-8 * max(l1, abs(mu @ h.q))
    assert abs(mu2 - (mu @ y - lam * h.q @ y + lam**2 * h.q @ h.q)) <= 1e-8 * scale
    assert abs(mu2 - (mu @ y - lam * l1)) <= 1e-8 * scale
    np.testing.assert_allclose(h.project(mu), mu, rtol=0, atol=1e-8 * np.abs(mu).max())


@SETTINGS
@given(instances(), st.floats(1e-6, 1.0))
def test_scaling_invariants(inst, delta):
    X, y, rng, w = inst
    _, fit = _interior_fit(X, y, w, rng)
    cfg = ScalingConfig(delta)
    sc = scale_fit(fit, y, cfg)
    assert sc.alpha_hat >= 1.0
    assert abs(sc.d1) <= sc.alpha_hat - 1.0 + 1e-12
    rss1 = np.sum((y - fit.mu) ** 2)
    rss_a = np.sum((y - sc.mu_scaled) ** 2)
    assert rss_a == pytest.approx(rss1 - sc.residual_gap, rel=1e-9, abs=1e-12 * rss1)
    assert rss_a <= rss1 * (1 + 1e-12)
    if fit.k_active:
        mu_post = hat_quantities(fit, X, y).mu_post
        assert np.sum((y - mu_post) ** 2) <= rss_a * (1 + 1e-10) + 1e-12


@SETTINGS
@given(instances())
def test_solvers_agree(inst):
    X, y, rng, w = inst
    _, fit = _interior_fit(X, y, w, rng)
    np.testing.assert_allclose(coordinate_descent(X, y, fit.lam, tol=1e-12).beta, fit.beta, atol=1e-6)


@SETTINGS
@given(instances(), st.floats(0.1, 10.0))
def test_sure_relations(inst, sigma2):
    X, y, rng, w = inst
    _, fit = _interior_fit(X, y, w, rng)
    n = y.size
    rep = sure_report(fit, y, sigma2, ScalingConfig())
    assert rep.sure_plain == pytest.approx(-sigma2 + rep.rss_plain / n + 2 * sigma2 * rep.k_active / n)
    assert rep.sure_scaled == pytest.approx(-sigma2 + rep.rss_scaled / n + 2 * sigma2 * (rep.d1 + rep.d2) / n)


@SETTINGS
@given(instances())
def test_back_transformation(inst):
    X, y, rng, w = inst
    raw = X * rng.uniform(0.5, 5, X.shape[1]) + rng.uniform(-3, 3, X.shape[1])
    d = standardize_design(raw, add_intercept=X.shape[1] < X.shape[0], rank_tol=None)
    beta = rng.standard_normal(d.m)
    offset, coef = d.to_original_scale(beta)
    np.testing.assert_allclose(offset + raw @ coef, d.values @ beta, atol=1e-9 * (1 + np.abs(beta).sum()))


@SETTINGS
@given(instances())
def test_path_starts_at_zero(inst):
    X, y, _, _ = inst
    path = lars_lasso_path(X, y)
    assert np.all(np.diff(path.lambdas) < 0)
    np.testing.assert_array_equal(path.coefs[:, 0], 0.0)
    assert path.lambda_max == pytest.approx(np.abs(X.T @ y).max(), rel=1e-12)
    assert oracles.lasso_cost(X, y, path.coefs[:, -1], 0.0) <= oracles.lasso_cost(X, y, np.zeros(X.shape[1]), 0.0)
