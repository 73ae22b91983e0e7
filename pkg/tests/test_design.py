import numpy as np
import pytest

from scaledlasso import ConstantColumn, DesignMatrix, InputError, RankDeficient, standardize_design


def test_three_point_column():
    d = standardize_design(np.array([[1.0], [2.0], [3.0]]))
    s = np.sqrt(1.5)
    np.testing.assert_allclose(d.values[:, 0], [-s, 0.0, s], atol=1e-15)
    assert abs(d.values[:, 0].mean()) < 1e-15
    assert d.values[:, 0] @ d.values[:, 0] == pytest.approx(3.0, rel=1e-15)


def test_standardization_is_idempotent(rng):
    raw = rng.standard_normal((30, 4)) * [1, 5, 0.1, 3] + [2, -1, 7, 0]
    once = standardize_design(raw)
    twice = standardize_design(once.values)
    np.testing.assert_allclose(twice.values, once.values, atol=1e-12)


def test_columns_have_mean_zero_and_norm_n(rng):
    raw = rng.standard_normal((40, 6)) * 3 + 1
    d = standardize_design(raw, add_intercept=True)
    assert d.has_intercept
    np.testing.assert_array_equal(d.values[:, 0], np.ones(40))
    rest = d.values[:, 1:]
    np.testing.assert_allclose(rest.mean(axis=0), 0.0, atol=1e-13)
    np.testing.assert_allclose((rest**2).sum(axis=0), 40.0, rtol=1e-13)


def test_existing_ones_column_becomes_the_intercept(rng):
    raw = np.column_stack([rng.standard_normal(10), np.ones(10), rng.standard_normal(10)])
    d = standardize_design(raw, add_intercept=True)
    assert d.m == 3
    np.testing.assert_array_equal(d.values[:, 0], np.ones(10))
    assert d.source_columns == (1, 0, 2)


def test_constant_column_rejected():
    raw = np.column_stack([np.arange(5.0), np.full(5, 2.0)])
    with pytest.raises(ConstantColumn):
        standardize_design(raw)


def test_duplicate_column_rank_deficient(rng):
    x = rng.standard_normal(20)
    with pytest.raises(RankDeficient):
        standardize_design(np.column_stack([x, 2 * x + 1]))
    # the check can be switched off for numerically singular designs
    d = standardize_design(np.column_stack([x, 2 * x + 1]), rank_tol=None)
    assert d.rho_min < 1e-12


def test_more_columns_than_rows(rng):
    with pytest.raises(RankDeficient):
        standardize_design(rng.standard_normal((3, 5)), rank_tol=None)


def test_nonfinite_rejected():
    with pytest.raises(InputError):
        standardize_design(np.array([[1.0], [np.nan]]))


def test_back_transformation_reproduces_fitted_values(rng):
    raw = rng.standard_normal((25, 4)) * [2, 1, 0.5, 4] + [1, 2, 3, 4]
    d = standardize_design(raw, add_intercept=True)
    beta = rng.standard_normal(5)
    offset, coef = d.to_original_scale(beta)
    np.testing.assert_allclose(offset + raw @ coef, d.values @ beta, atol=1e-9)


def test_gram_eigenvalues(rng):
    X = rng.standard_normal((30, 3))
    d = DesignMatrix(X)
    ev = np.linalg.eigvalsh(X.T @ X / 30)
    assert d.rho_min == pytest.approx(ev[0], rel=1e-12)
    assert d.rho_max == pytest.approx(ev[-1], rel=1e-12)


def test_design_is_read_only(rng):
    d = DesignMatrix(rng.standard_normal((4, 2)))
    with pytest.raises(ValueError):
        d.values[0, 0] = 1.0
