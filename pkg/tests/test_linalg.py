"""Standardization and OLS: contract tests against brute-force oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgpv_select.errors import ConstantColumn, RankDeficient, TooFewRows, Underdetermined
from sgpv_select.linalg import Dataset, intercept_only_fit, ols_fit, standardize


def make_data(n, p, seed=0, names=None):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = rng.standard_normal(n)
    names = names or tuple(f"V{j+1}" for j in range(p))
    return Dataset(y=y, X=X, column_names=names)


def brute_force_ols(M, y):
    """Textbook normal-equations solution, the independent oracle for ols_fit."""
    xtx_inv = np.linalg.inv(M.T @ M)
    beta = xtx_inv @ M.T @ y
    resid = y - M @ beta
    df = M.shape[0] - M.shape[1]
    sigma2 = (resid @ resid) / df if df > 0 else 0.0
    se = np.sqrt(sigma2 * np.diag(xtx_inv))
    return beta, se, sigma2


# ---------------------------------------------------------------- Dataset


def test_dataset_validates_shapes_and_names():
    with pytest.raises(ValueError):
        Dataset(y=[1.0, 2.0], X=[[1.0], [2.0], [3.0]], column_names=("a",))
    with pytest.raises(ValueError):
        Dataset(y=[1.0, 2.0], X=[[1.0], [2.0]], column_names=("a", "b"))
    with pytest.raises(ValueError):
        Dataset(y=[1.0, 2.0], X=[[1.0, 2.0], [2.0, 3.0]], column_names=("a", "a"))
    with pytest.raises(ValueError):
        Dataset(y=[1.0, np.nan], X=[[1.0], [2.0]], column_names=("a",))
    with pytest.raises(ValueError):
        Dataset(y=[1.0, 2.0], X=[[np.inf], [2.0]], column_names=("a",))


def test_dataset_arrays_are_read_only():
    data = make_data(5, 2)
    with pytest.raises(ValueError):
        data.X[0, 0] = 99.0


def test_select_columns_keeps_order_and_names():
    data = make_data(6, 4, names=("a", "b", "c", "d"))
    sub = data.select_columns([2, 0])
    assert sub.column_names == ("c", "a")
    np.testing.assert_array_equal(sub.X[:, 0], data.X[:, 2])
    np.testing.assert_array_equal(sub.y, data.y)


# ----------------------------------------------------------- standardize


def test_standardize_three_point_example():
    # X column (1,2,3) and y (2,4,6) both standardize to (-1, 0, 1).
    data = Dataset(y=[2.0, 4.0, 6.0], X=[[1.0], [2.0], [3.0]], column_names=("x",))
    std = standardize(data)
    np.testing.assert_allclose(std.X[:, 0], [-1.0, 0.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(std.y, [-1.0, 0.0, 1.0], atol=1e-12)
    assert std.x_scales[0] == pytest.approx(1.0)
    assert std.y_scale == pytest.approx(2.0)
    assert std.x_centers[0] == pytest.approx(2.0)
    assert std.y_center == pytest.approx(4.0)


def test_standardize_constant_column_raises_with_name():
    data = Dataset(
        y=[1.0, 2.0, 3.0],
        X=[[5.0, 1.0], [5.0, 2.0], [5.0, 4.0]],
        column_names=("flat", "ok"),
    )
    with pytest.raises(ConstantColumn) as err:
        standardize(data)
    assert err.value.name == "flat"


def test_standardize_constant_outcome_raises():
    data = Dataset(y=[3.0, 3.0, 3.0], X=[[1.0], [2.0], [4.0]], column_names=("x",))
    with pytest.raises(ConstantColumn):
        standardize(data)


def test_standardize_too_few_rows():
    data = Dataset(y=[1.0], X=[[1.0]], column_names=("x",))
    with pytest.raises(TooFewRows):
        standardize(data)


def test_standardize_random_matrix_means_and_sds():
    # Oracle: recompute column means and n-1 sds of the standardized output.
    data = make_data(50, 10, seed=3)
    std = standardize(data)
    assert np.all(np.abs(std.X.mean(axis=0)) < 1e-10)
    assert np.all(np.abs(std.X.std(axis=0, ddof=1) - 1.0) < 1e-8)
    assert abs(std.y.mean()) < 1e-10
    assert abs(std.y.std(ddof=1) - 1.0) < 1e-8


def test_standardize_round_trip():
    data = make_data(30, 4, seed=7)
    std = standardize(data)
    X_back = std.X * std.x_scales + std.x_centers
    y_back = std.y * std.y_scale + std.y_center
    np.testing.assert_allclose(X_back, data.X, rtol=1e-10)
    np.testing.assert_allclose(y_back, data.y, rtol=1e-10)


def test_destandardize_coefficients_predict_parity():
    data = make_data(40, 5, seed=11)
    std = standardize(data)
    beta_std = np.random.default_rng(1).standard_normal(5)
    intercept, beta = std.destandardize_coefficients(beta_std)
    lhs = intercept + data.X @ beta
    rhs = std.y_center + std.y_scale * (std.X @ beta_std)
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)


def test_standardized_subset_keeps_scaling_metadata():
    data = make_data(25, 6, seed=5)
    std = standardize(data)
    sub = std.select_columns([4, 1])
    np.testing.assert_array_equal(sub.x_scales, std.x_scales[[4, 1]])
    np.testing.assert_array_equal(sub.x_centers, std.x_centers[[4, 1]])
    assert sub.y_scale == std.y_scale


# ----------------------------------------------------------------- ols_fit


def test_ols_hand_computed_simple_regression():
    # x = (0,1,2), y = (1,3,4): slope 3/2, intercept 7/6, sigma2 = 1/6,
    # se(slope) = sqrt(1/12), se(intercept) = sqrt(5/36) -- worked by hand.
    data = Dataset(y=[1.0, 3.0, 4.0], X=[[0.0], [1.0], [2.0]], column_names=("x",))
    fit = ols_fit(data, with_intercept=True)
    assert fit.beta_hat[0] == pytest.approx(1.5, abs=1e-12)
    assert fit.intercept == pytest.approx(7.0 / 6.0, abs=1e-12)
    assert fit.sigma2_hat == pytest.approx(1.0 / 6.0, abs=1e-12)
    assert fit.se[0] == pytest.approx(np.sqrt(1.0 / 12.0), abs=1e-12)
    assert fit.intercept_se == pytest.approx(np.sqrt(5.0 / 36.0), abs=1e-12)
    assert fit.df_resid == 1


def test_ols_noiseless_is_exact():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((20, 1))
    data = Dataset(y=3.0 * X[:, 0], X=X, column_names=("x",))
    fit = ols_fit(data, with_intercept=True)
    assert abs(fit.beta_hat[0] - 3.0) < 1e-10
    assert fit.sigma2_hat == pytest.approx(0.0, abs=1e-18)


def test_ols_centered_identity_case():
    x = np.array([1.0, 2.0, 3.0]) - 2.0
    data = Dataset(y=x, X=x[:, None], column_names=("x",))
    fit = ols_fit(data, with_intercept=False)
    assert fit.beta_hat[0] == pytest.approx(1.0, abs=1e-12)
    assert fit.rss == pytest.approx(0.0, abs=1e-20)


def test_ols_matches_brute_force_normal_equations():
    data = make_data(40, 5, seed=17)
    rng = np.random.default_rng(18)
    beta_true = rng.standard_normal(5)
    y = data.X @ beta_true + 0.5 * rng.standard_normal(40)
    data = Dataset(y=y, X=data.X, column_names=data.column_names)

    fit = ols_fit(data, with_intercept=True)
    M = np.column_stack([np.ones(40), data.X])
    beta_o, se_o, sigma2_o = brute_force_ols(M, y)
    np.testing.assert_allclose(fit.beta_hat, beta_o[1:], atol=1e-8)
    np.testing.assert_allclose(fit.se, se_o[1:], atol=1e-8)
    assert fit.intercept == pytest.approx(beta_o[0], abs=1e-8)
    assert fit.sigma2_hat == pytest.approx(sigma2_o, rel=1e-10)

    fit_nc = ols_fit(data, with_intercept=False)
    beta_o, se_o, _ = brute_force_ols(data.X, y)
    np.testing.assert_allclose(fit_nc.beta_hat, beta_o, atol=1e-8)
    np.testing.assert_allclose(fit_nc.se, se_o, atol=1e-8)
    assert fit_nc.intercept is None


@pytest.mark.parametrize("p", [1, 3, 8])
def test_ols_se_closed_form_small_p(p):
    for seed in range(4):
        data = make_data(30, p, seed=100 + seed)
        fit = ols_fit(data, with_intercept=False)
        _, se_o, _ = brute_force_ols(data.X, data.y)
        np.testing.assert_allclose(fit.se, se_o, rtol=1e-9)
        assert np.all(fit.se > 0)


def test_ols_residual_orthogonality():
    data = make_data(60, 6, seed=23)
    fit = ols_fit(data, with_intercept=True)
    resid = data.y - (fit.intercept + data.X @ fit.beta_hat)
    scale = max(1.0, float(np.abs(data.X).max()) * float(np.abs(resid).max()))
    assert np.max(np.abs(data.X.T @ resid)) / scale < 1e-8
    assert abs(resid.sum()) / scale < 1e-8


def test_ols_projection_idempotence():
    data = make_data(40, 4, seed=29)
    fit = ols_fit(data, with_intercept=True)
    fitted = fit.intercept + data.X @ fit.beta_hat
    refit = ols_fit(
        Dataset(y=fitted, X=data.X, column_names=data.column_names),
        with_intercept=True,
    )
    np.testing.assert_allclose(refit.beta_hat, fit.beta_hat, atol=1e-10)
    assert refit.intercept == pytest.approx(fit.intercept, abs=1e-10)


def test_ols_rank_deficient_raises():
    rng = np.random.default_rng(31)
    x = rng.standard_normal(20)
    X = np.column_stack([x, 2.0 * x])
    data = Dataset(y=rng.standard_normal(20), X=X, column_names=("a", "b"))
    with pytest.raises(RankDeficient):
        ols_fit(data, with_intercept=False)


def test_ols_underdetermined_raises():
    data = make_data(4, 4, seed=37)
    with pytest.raises(Underdetermined):
        ols_fit(data, with_intercept=True)  # 5 parameters, 4 rows


@settings(max_examples=25, deadline=None)
@given(
    c=st.floats(min_value=0.01, max_value=100.0),
    seed=st.integers(min_value=0, max_value=50),
)
def test_ols_column_scale_equivariance(c, seed):
    # Multiplying column k by c divides beta_k and se_k by c, leaves others alone.
    data = make_data(30, 3, seed=seed)
    fit = ols_fit(data, with_intercept=True)
    X2 = data.X.copy()
    X2[:, 1] *= c
    fit2 = ols_fit(
        Dataset(y=data.y, X=X2, column_names=data.column_names), with_intercept=True
    )
    np.testing.assert_allclose(fit2.beta_hat[1] * c, fit.beta_hat[1], rtol=1e-10)
    np.testing.assert_allclose(fit2.se[1] * c, fit.se[1], rtol=1e-10)
    np.testing.assert_allclose(fit2.beta_hat[[0, 2]], fit.beta_hat[[0, 2]], rtol=1e-9)


def test_intercept_only_fit_is_the_mean():
    y = np.array([1.0, 2.0, 6.0])
    fit = intercept_only_fit(y)
    assert fit.intercept == pytest.approx(3.0)
    assert fit.sigma2_hat == pytest.approx(np.var(y, ddof=1))
    assert fit.df_resid == 2
    assert fit.p == 0
