"""Comparison methods for the benchmark: plain lasso at the information-
criterion grid point, the adaptive (weighted) lasso, and the oracle least-
squares fit on the true support.

All three report original-scale intercept + coefficients so the benchmark can
treat every method uniformly.  The lasso variants report penalized estimates
back-transformed from the standardized problem; ``refit=True`` on the adaptive
lasso swaps in an OLS refit on the selected support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .lasso import LassoPath, cd_solve, gic_select, lambda_grid
from .linalg import Dataset, StandardizedDataset, intercept_only_fit, ols_fit, standardize
from .select import SelectConfig


@dataclass(frozen=True)
class BaselineFit:
    """Original-scale fit produced by one of the comparison methods."""

    selected: tuple[int, ...]
    intercept: float
    coefficients: NDArray[np.float64]
    column_names: tuple[str, ...]
    lambda_gic: float
    method: str

    def predict(self, X: NDArray[np.float64]) -> NDArray[np.float64]:
        X = np.asarray(X, dtype=np.float64)
        return self.intercept + X @ self.coefficients


def _empty_fit(data: Dataset, method: str, lam: float) -> BaselineFit:
    return BaselineFit(
        selected=(),
        intercept=float(data.y.mean()),
        coefficients=np.zeros(data.p),
        column_names=data.column_names,
        lambda_gic=lam,
        method=method,
    )


def lasso_gic_fit(data: Dataset, config: SelectConfig | None = None) -> BaselineFit:
    """Penalized solution at the information-criterion grid point, original scale."""
    cfg = config or SelectConfig()
    std = standardize(data)
    grid = lambda_grid(std, cfg.grid_size, cfg.grid_ratio)
    path = cd_solve(std, grid, tol=cfg.cd_tol, max_iter=cfg.cd_max_iter)
    choice = gic_select(path, std)
    beta_std = path.betas[choice.chosen_index]
    intercept, beta = std.destandardize_coefficients(beta_std)
    return BaselineFit(
        selected=tuple(int(j) for j in np.flatnonzero(beta_std)),
        intercept=intercept,
        coefficients=beta,
        column_names=data.column_names,
        lambda_gic=choice.lambda_gic,
        method="lasso",
    )


def weighted_lasso_path(
    std: StandardizedDataset,
    weights: NDArray[np.float64],
    config: SelectConfig,
) -> tuple[LassoPath, NDArray[np.float64]]:
    """Solve the weighted-penalty path by column rescaling.

    ``weights`` has one positive finite entry per column of ``std``; column j
    is rescaled to X_j / w_j, the plain path is solved on the rescaled design,
    and coefficients are returned on the rescaled scale (divide by w to get
    back).  Also returns the grid used.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (std.p,):
        raise ValueError(f"expected {std.p} weights, got shape {weights.shape}")
    if np.any(~np.isfinite(weights)) or np.any(weights <= 0.0):
        raise ValueError("weights must be positive and finite")
    X_w = std.X / weights
    lam_max = float(np.max(np.abs(X_w.T @ std.y)) / std.n)
    if lam_max <= 0.0:
        raise ValueError("lambda_max is 0 for the weighted problem")
    ratio = config.grid_ratio
    if ratio is None:
        ratio = 1e-4 if std.n > std.p else 1e-2
    grid = np.geomspace(lam_max, lam_max * ratio, config.grid_size)
    scaled = StandardizedDataset(
        y=std.y,
        X=X_w,
        column_names=std.column_names,
        y_center=std.y_center,
        y_scale=std.y_scale,
        x_centers=std.x_centers,
        x_scales=std.x_scales * weights,
    )
    path = cd_solve(scaled, grid, tol=config.cd_tol, max_iter=config.cd_max_iter)
    return path, grid


def adaptive_lasso_fit(
    data: Dataset,
    config: SelectConfig | None = None,
    gamma: float = 1.0,
    refit: bool = False,
) -> BaselineFit:
    """Two-step weighted lasso: weights 1/|initial beta|^gamma from a first
    path solve, then a weighted path with its own information-criterion pick.

    Variables with a zero initial estimate carry infinite weight and are
    excluded from the weighted problem entirely; if every weight is infinite
    the empty (intercept-only) model is returned, not an exception.
    """
    if gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    cfg = config or SelectConfig()
    std = standardize(data)
    grid = lambda_grid(std, cfg.grid_size, cfg.grid_ratio)
    path = cd_solve(std, grid, tol=cfg.cd_tol, max_iter=cfg.cd_max_iter)
    choice = gic_select(path, std)
    beta_init = path.betas[choice.chosen_index]

    active0 = [int(j) for j in np.flatnonzero(beta_init)]
    if not active0:
        return _empty_fit(data, "alasso", choice.lambda_gic)

    sub = std.select_columns(active0)
    weights = 1.0 / np.abs(beta_init[active0]) ** gamma
    wpath, _ = weighted_lasso_path(sub, weights, cfg)
    # log(p) keeps the full feature count: the model search is over all p columns.
    wchoice = gic_select(wpath, sub, p_total=data.p)
    beta_scaled = wpath.betas[wchoice.chosen_index]
    beta_std_sub = beta_scaled / weights

    beta_std = np.zeros(data.p)
    beta_std[active0] = beta_std_sub
    selected = tuple(int(j) for j in np.flatnonzero(beta_std))

    if refit and selected:
        fit = ols_fit(data.select_columns(list(selected)), with_intercept=True)
        coefficients = np.zeros(data.p)
        coefficients[list(selected)] = fit.beta_hat
        intercept = float(fit.intercept)
    else:
        intercept, coefficients = std.destandardize_coefficients(beta_std)
        if refit and not selected:
            intercept = float(data.y.mean())
            coefficients = np.zeros(data.p)

    return BaselineFit(
        selected=selected,
        intercept=intercept,
        coefficients=coefficients,
        column_names=data.column_names,
        lambda_gic=wchoice.lambda_gic,
        method="alasso",
    )


def oracle_ols(data: Dataset, true_support: tuple[int, ...] | list[int]) -> BaselineFit:
    """Least squares on the true support with an intercept (the benchmark's
    reference method for relative error metrics).

    An empty support gives the intercept-only fit.  Raises Underdetermined via
    the OLS layer when |support| + 1 > n.
    """
    support = sorted(int(j) for j in true_support)
    if any(j < 0 or j >= data.p for j in support):
        raise ValueError("true_support contains out-of-range column indices")
    coefficients = np.zeros(data.p)
    if support:
        fit = ols_fit(data.select_columns(support), with_intercept=True)
        coefficients[support] = fit.beta_hat
        intercept = float(fit.intercept)
    else:
        fit = intercept_only_fit(data.y)
        intercept = float(fit.intercept)
    return BaselineFit(
        selected=tuple(support),
        intercept=intercept,
        coefficients=coefficients,
        column_names=data.column_names,
        lambda_gic=float("nan"),
        method="oracle",
    )
