"""Two-stage variable selection: a penalized path narrows the problem to a
candidate set, then interval-null screening keeps the coefficients whose
confidence intervals clear a data-driven null region.

Stage one standardizes the data, solves the L1 path, and picks the grid point
by information criterion; the active set there (the candidate set C) gets a
plain least-squares refit on the standardized scale.  Stage two screens those
refit coefficients: keep k iff the overlap p-value is exactly 0, equivalently
|beta_hat_k| > 1.96 * se_k + bound.  The kept set S is refit by OLS with an
intercept on the original scale; that refit is what the coefficients report.

A one-stage variant skips the path and screens the full OLS fit directly; it
needs p < n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.stats
from numpy.typing import NDArray

from .errors import CandidateTooLarge, Underdetermined
from .lasso import (
    DEFAULT_GRID_SIZE,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    cd_solve,
    gic_select,
    lambda_grid,
)
from .linalg import Dataset, OlsFit, StandardizedDataset, intercept_only_fit, ols_fit, standardize
from .sgpv import SgpvReport, Z_CRIT, null_bound, screen

NULL_BOUND_VARIANTS = ("sebar", "sebar-loginfl", "sebar-logdefl", "const", "zero")


@dataclass(frozen=True)
class SelectConfig:
    """Tuning knobs for the selection pipeline.  Defaults match the benchmark setup.

    ``use_t_quantile`` swaps the fixed 1.96 in stage two for the t(df_resid)
    0.975 quantile; off by default.  ``max_candidates`` caps the candidate set
    when it is too large to refit (default n // 2 at fit time); with
    ``truncate_candidates`` off an oversized candidate set raises instead.
    """

    grid_size: int = DEFAULT_GRID_SIZE
    grid_ratio: float | None = None
    cd_tol: float = DEFAULT_TOL
    cd_max_iter: int = DEFAULT_MAX_ITER
    null_bound_variant: str = "sebar"
    use_t_quantile: bool = False
    truncate_candidates: bool = True
    max_candidates: int | None = None

    def __post_init__(self) -> None:
        if self.null_bound_variant not in NULL_BOUND_VARIANTS:
            raise ValueError(
                f"null_bound_variant must be one of {NULL_BOUND_VARIANTS}, "
                f"got {self.null_bound_variant!r}"
            )


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of a selection run.

    ``coefficients`` is a length-p vector on the original data scale with exact
    zeros off the selected support; together with ``intercept`` it reproduces
    the OLS refit of y on the selected columns.  ``stage1_candidates`` is the
    candidate set C, ``selected`` the screened set S (both sorted).
    """

    selected: tuple[int, ...]
    intercept: float
    coefficients: NDArray[np.float64]
    column_names: tuple[str, ...]
    stage1_candidates: tuple[int, ...]
    stage1_lambda: float
    null_bound_value: float
    sgpv: SgpvReport | None
    refit: OlsFit
    method: str

    @property
    def selected_names(self) -> tuple[str, ...]:
        return tuple(self.column_names[i] for i in self.selected)

    def predict(self, X: NDArray[np.float64]) -> NDArray[np.float64]:
        X = np.asarray(X, dtype=np.float64)
        return self.intercept + X @ self.coefficients


def _truncate_candidates(
    candidates: list[int],
    stage1_beta: NDArray[np.float64],
    n: int,
    config: SelectConfig,
) -> list[int]:
    """Cap |C| below n so the standardized refit is identified.

    An explicit ``max_candidates`` also acts as a user cap even when |C| < n.
    Survivors are the candidates with the largest stage-one coefficients.
    """
    cap: int | None = None
    if len(candidates) >= n:
        if not config.truncate_candidates:
            raise CandidateTooLarge(
                f"candidate set has {len(candidates)} variables but only {n} rows"
            )
        cap = config.max_candidates if config.max_candidates is not None else n // 2
    elif config.max_candidates is not None and len(candidates) > config.max_candidates:
        cap = config.max_candidates
    if cap is None:
        return candidates
    cap = max(1, min(cap, n - 1))
    ranked = sorted(candidates, key=lambda j: abs(stage1_beta[j]), reverse=True)
    return sorted(ranked[:cap])


def _screen_and_refit(
    data: Dataset,
    std: StandardizedDataset,
    candidates: list[int],
    stage1_lambda: float,
    config: SelectConfig,
    method: str,
) -> SelectionResult:
    """Stage two: standardized OLS on C, null bound, screening, original-scale refit."""
    p = data.p
    if not candidates:
        fit = intercept_only_fit(data.y)
        return SelectionResult(
            selected=(),
            intercept=float(fit.intercept),
            coefficients=np.zeros(p),
            column_names=data.column_names,
            stage1_candidates=(),
            stage1_lambda=stage1_lambda,
            null_bound_value=float("nan"),
            sgpv=None,
            refit=fit,
            method=method,
        )

    cand_fit = ols_fit(std.select_columns(candidates), with_intercept=False)
    bound = null_bound(
        cand_fit, config.null_bound_variant, n=data.n, p=data.p
    )
    if config.use_t_quantile and cand_fit.df_resid > 0:
        z = float(scipy.stats.t.ppf(0.975, cand_fit.df_resid))
    else:
        z = Z_CRIT
    report = screen(cand_fit, bound, z=z)
    selected = tuple(c for c, keep in zip(candidates, report.keep) if keep)

    coefficients = np.zeros(p)
    if selected:
        fit = ols_fit(data.select_columns(selected), with_intercept=True)
        coefficients[list(selected)] = fit.beta_hat
        intercept = float(fit.intercept)
    else:
        fit = intercept_only_fit(data.y)
        intercept = float(fit.intercept)

    return SelectionResult(
        selected=selected,
        intercept=intercept,
        coefficients=coefficients,
        column_names=data.column_names,
        stage1_candidates=tuple(candidates),
        stage1_lambda=stage1_lambda,
        null_bound_value=bound,
        sgpv=report,
        refit=fit,
        method=method,
    )


def fit_two_stage(data: Dataset, config: SelectConfig | None = None) -> SelectionResult:
    """Full pipeline: path + information criterion, then interval-null screening.

    Raises
    ------
    TooFewRows, ConstantColumn
        From standardization.
    DegenerateGic
        If n < 3.
    CandidateTooLarge
        If |C| >= n and truncation is disabled.
    """
    cfg = config or SelectConfig()
    std = standardize(data)
    grid = lambda_grid(std, cfg.grid_size, cfg.grid_ratio)
    path = cd_solve(std, grid, tol=cfg.cd_tol, max_iter=cfg.cd_max_iter)
    choice = gic_select(path, std)
    candidates = sorted(choice.candidate_set)
    candidates = _truncate_candidates(
        candidates, path.betas[choice.chosen_index], data.n, cfg
    )
    return _screen_and_refit(data, std, candidates, choice.lambda_gic, cfg, "two_stage")


def fit_one_stage(data: Dataset, config: SelectConfig | None = None) -> SelectionResult:
    """Screen the full standardized OLS fit directly (no path stage).

    Needs p < n so the full fit is identified; raises Underdetermined otherwise.
    """
    cfg = config or SelectConfig()
    if data.p >= data.n:
        raise Underdetermined(
            f"one-stage selection needs p < n, got p={data.p}, n={data.n}"
        )
    std = standardize(data)
    candidates = list(range(data.p))
    return _screen_and_refit(data, std, candidates, 0.0, cfg, "one_stage")
