"""Dense least-squares substrate: dataset containers, standardization, OLS with
classical standard errors.

Everything downstream (the path solver, the screening stage, the baselines) sits
on top of the two operations here: ``standardize`` and ``ols_fit``.  Both are
deliberately strict about degenerate input — constant columns, rank deficiency
and underdetermined fits raise typed errors instead of producing pseudo-inverse
answers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from .errors import ConstantColumn, RankDeficient, TooFewRows, Underdetermined

# Columns with sample sd below this are treated as constant.
SD_FLOOR = 1e-12


def _as_readonly(values: ArrayLike, ndim: int, what: str) -> NDArray[np.float64]:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} contains non-finite values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """An outcome vector paired with a design matrix and column labels.

    Arrays are copied to float64 and marked read-only on construction, so a
    ``Dataset`` is safe to share across worker processes and threads.

    Parameters
    ----------
    y : array_like, shape (n,)
        Outcome values.  Must be finite.
    X : array_like, shape (n, p)
        Design matrix, one column per variable.  Must be finite, p >= 1.
    column_names : sequence of str
        Unique label per column of ``X``.
    """

    y: NDArray[np.float64]
    X: NDArray[np.float64]
    column_names: tuple[str, ...]

    def __post_init__(self) -> None:
        y = _as_readonly(self.y, 1, "y")
        X = _as_readonly(self.X, 2, "X")
        names = tuple(str(c) for c in self.column_names)
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        if X.shape[1] < 1:
            raise ValueError("X must have at least one column")
        if len(names) != X.shape[1]:
            raise ValueError(f"{len(names)} names for {X.shape[1]} columns")
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "column_names", names)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def select_columns(self, indices: tuple[int, ...] | list[int]) -> "Dataset":
        """Return a new dataset restricted to the given column indices (order kept)."""
        idx = list(indices)
        if not idx:
            raise ValueError("select_columns needs at least one column index")
        return Dataset(
            y=self.y,
            X=self.X[:, idx],
            column_names=tuple(self.column_names[i] for i in idx),
        )


@dataclass(frozen=True)
class StandardizedDataset(Dataset):
    """A ``Dataset`` whose columns and outcome were centered and scaled.

    Stores the centering/scaling constants needed to map coefficients fitted on
    this data back to the original scale.
    """

    y_center: float
    y_scale: float
    x_centers: NDArray[np.float64]
    x_scales: NDArray[np.float64]

    def __post_init__(self) -> None:
        super().__post_init__()
        object.__setattr__(self, "y_center", float(self.y_center))
        object.__setattr__(self, "y_scale", float(self.y_scale))
        object.__setattr__(self, "x_centers", _as_readonly(self.x_centers, 1, "x_centers"))
        object.__setattr__(self, "x_scales", _as_readonly(self.x_scales, 1, "x_scales"))
        if self.x_centers.shape[0] != self.p or self.x_scales.shape[0] != self.p:
            raise ValueError("centers/scales must have one entry per column")

    def select_columns(self, indices: tuple[int, ...] | list[int]) -> "StandardizedDataset":
        idx = list(indices)
        if not idx:
            raise ValueError("select_columns needs at least one column index")
        return StandardizedDataset(
            y=self.y,
            X=self.X[:, idx],
            column_names=tuple(self.column_names[i] for i in idx),
            y_center=self.y_center,
            y_scale=self.y_scale,
            x_centers=self.x_centers[idx],
            x_scales=self.x_scales[idx],
        )

    def destandardize_coefficients(
        self, beta_std: NDArray[np.float64]
    ) -> tuple[float, NDArray[np.float64]]:
        """Map coefficients fitted on standardized (y, X) to original scale.

        Returns ``(intercept, beta)`` such that ``intercept + X_orig @ beta``
        reproduces ``y_center + y_scale * (X_std @ beta_std)``.
        """
        beta_std = np.asarray(beta_std, dtype=np.float64)
        if beta_std.shape != (self.p,):
            raise ValueError(f"expected {self.p} coefficients, got shape {beta_std.shape}")
        beta = beta_std * (self.y_scale / self.x_scales)
        intercept = self.y_center - float(self.x_centers @ beta)
        return intercept, beta


def standardize(data: Dataset) -> StandardizedDataset:
    """Center and scale the outcome and every column of the design.

    Sample standard deviations use denominator n-1.  After this transform each
    column (and the outcome) has mean 0 and sd 1, which is the scale the path
    solver and the screening stage operate on.

    Raises
    ------
    TooFewRows
        If n < 2 (sd undefined).
    ConstantColumn
        If any column of X, or the outcome, has sd < 1e-12.
    """
    if data.n < 2:
        raise TooFewRows(f"standardization needs n >= 2 rows, got {data.n}")
    x_centers = data.X.mean(axis=0)
    x_scales = data.X.std(axis=0, ddof=1)
    for j in np.flatnonzero(x_scales < SD_FLOOR):
        raise ConstantColumn(data.column_names[int(j)])
    y_center = float(data.y.mean())
    y_scale = float(data.y.std(ddof=1))
    if y_scale < SD_FLOOR:
        # A flat outcome makes every downstream fit 0/0; fail loudly instead.
        raise ConstantColumn("<outcome>")
    return StandardizedDataset(
        y=(data.y - y_center) / y_scale,
        X=(data.X - x_centers) / x_scales,
        column_names=data.column_names,
        y_center=y_center,
        y_scale=y_scale,
        x_centers=x_centers,
        x_scales=x_scales,
    )


@dataclass(frozen=True)
class OlsFit:
    """Coefficients and classical standard errors from a least-squares fit.

    ``beta_hat`` and ``se`` are aligned with the fitted dataset's columns; the
    intercept (when requested) is kept separate.  ``sigma2_hat`` is
    RSS / df_resid, or 0.0 when df_resid == 0 (saturated fit).
    """

    beta_hat: NDArray[np.float64]
    se: NDArray[np.float64]
    sigma2_hat: float
    df_resid: int
    rss: float
    intercept: float | None = None
    intercept_se: float | None = None

    @property
    def p(self) -> int:
        return self.beta_hat.shape[0]


def ols_fit(data: Dataset, with_intercept: bool = True) -> OlsFit:
    """Least squares via economic QR, with textbook coefficient standard errors.

    se_k = sqrt(sigma2_hat * [(M'M)^-1]_kk) where M is the fitted design
    (including the intercept column when requested).  Rank deficiency is an
    error here, never a silent pseudo-inverse solve.

    Raises
    ------
    Underdetermined
        If the number of fitted parameters exceeds n.
    RankDeficient
        If the QR factorization detects rank < number of fitted parameters.
    """
    n, p = data.n, data.p
    p_fit = p + (1 if with_intercept else 0)
    if p_fit > n:
        raise Underdetermined(f"{p_fit} parameters but only {n} rows")
    if with_intercept:
        M = np.column_stack([np.ones(n), data.X])
    else:
        M = data.X

    Q, R = scipy.linalg.qr(M, mode="economic")
    diag = np.abs(np.diag(R))
    tol = np.finfo(np.float64).eps * max(n, p_fit) * (diag.max() if diag.size else 0.0)
    if diag.size == 0 or np.any(diag <= tol):
        raise RankDeficient(f"design has numerical rank < {p_fit}")

    coef = scipy.linalg.solve_triangular(R, Q.T @ data.y)
    resid = data.y - M @ coef
    rss = float(resid @ resid)
    df_resid = n - p_fit
    sigma2 = rss / df_resid if df_resid > 0 else 0.0

    # (M'M)^-1 = R^-1 R^-T, so its diagonal is the squared row norms of R^-1.
    r_inv = scipy.linalg.solve_triangular(R, np.eye(p_fit))
    xtx_inv_diag = np.einsum("ij,ij->i", r_inv, r_inv)
    se_all = np.sqrt(sigma2 * xtx_inv_diag)

    if with_intercept:
        return OlsFit(
            beta_hat=coef[1:],
            se=se_all[1:],
            sigma2_hat=sigma2,
            df_resid=df_resid,
            rss=rss,
            intercept=float(coef[0]),
            intercept_se=float(se_all[0]),
        )
    return OlsFit(
        beta_hat=coef,
        se=se_all,
        sigma2_hat=sigma2,
        df_resid=df_resid,
        rss=rss,
    )


def intercept_only_fit(y: ArrayLike) -> OlsFit:
    """The degenerate fit used when no variables are selected: mean of y."""
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[0]
    if n < 1:
        raise TooFewRows("intercept-only fit needs at least one row")
    mean = float(y.mean())
    resid = y - mean
    rss = float(resid @ resid)
    df_resid = n - 1
    sigma2 = rss / df_resid if df_resid > 0 else 0.0
    se = float(np.sqrt(sigma2 / n))
    empty = np.zeros(0)
    return OlsFit(
        beta_hat=empty,
        se=empty.copy(),
        sigma2_hat=sigma2,
        df_resid=df_resid,
        rss=rss,
        intercept=mean,
        intercept_se=se,
    )
