"""L1-penalized least squares along a geometric grid, plus an information
criterion for picking one grid point.

The objective solved at each grid point is

    (1 / (2n)) * ||y - X b||^2 + lam * ||b||_1

i.e. the per-observation scaling, so ``lambda_max = max_j |X_j'y| / n`` is the
smallest penalty with an all-zero solution.  Solutions along the grid are
warm-started cyclic coordinate descent on the Gram formulation; the inner loop
is compiled with numba but the algorithm is entirely local to this module.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numba import njit
from numpy.typing import NDArray

from .errors import DegenerateGic, NoConvergenceWarning
from .linalg import Dataset, StandardizedDataset

DEFAULT_GRID_SIZE = 100
DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 100_000


@njit(cache=True)
def _cd_kernel(gram, xty, lam, beta, tol, max_iter, kkt_eps):  # pragma: no cover
    """Cyclic coordinate descent for one penalty value.

    gram = X'X/n, xty = X'y/n; ``beta`` is updated in place (warm start in,
    solution out).  Maintains grad = X'(y - X beta)/n incrementally and only
    declares convergence once both the max coefficient change is below ``tol``
    and the stationarity conditions hold to within ``kkt_eps``.
    Returns (sweeps_used, converged).
    """
    p = beta.shape[0]
    grad = xty - gram @ beta
    it = 0
    while it < max_iter:
        it += 1
        max_delta = 0.0
        for j in range(p):
            gjj = gram[j, j]
            bj = beta[j]
            z = grad[j] + gjj * bj
            if z > lam:
                bnew = (z - lam) / gjj
            elif z < -lam:
                bnew = (z + lam) / gjj
            else:
                bnew = 0.0
            delta = bnew - bj
            if delta != 0.0:
                beta[j] = bnew
                # gram is symmetric, so row j doubles as column j.
                grad -= gram[j] * delta
                if abs(delta) > max_delta:
                    max_delta = abs(delta)
        if max_delta < tol:
            viol = 0.0
            for j in range(p):
                if beta[j] > 0.0:
                    v = abs(grad[j] - lam)
                elif beta[j] < 0.0:
                    v = abs(grad[j] + lam)
                else:
                    v = abs(grad[j]) - lam
                    if v < 0.0:
                        v = 0.0
                if v > viol:
                    viol = v
            if viol <= kkt_eps:
                return it, True
    return it, False


@dataclass(frozen=True)
class LassoPath:
    """Solutions of the penalized objective along a decreasing penalty grid."""

    lambdas: NDArray[np.float64]
    betas: NDArray[np.float64]
    active_sets: tuple[frozenset[int], ...]
    n_iters: NDArray[np.int64]
    converged: NDArray[np.bool_]

    @property
    def grid_size(self) -> int:
        return self.lambdas.shape[0]


def lambda_grid(
    data: Dataset,
    grid_size: int = DEFAULT_GRID_SIZE,
    ratio: float | None = None,
) -> NDArray[np.float64]:
    """Geometric penalty grid from lambda_max down to ratio * lambda_max.

    ``ratio`` defaults to 1e-4 when n > p and 1e-2 otherwise (wide designs need
    a shorter grid or the tail solutions are hopelessly dense).

    Raises
    ------
    ValueError
        If grid_size < 2, ratio outside (0, 1), or lambda_max == 0 (outcome
        orthogonal to every column — a geometric grid from 0 is undefined).
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    if ratio is None:
        ratio = 1e-4 if data.n > data.p else 1e-2
    if not (0.0 < ratio < 1.0):
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    lam_max = float(np.max(np.abs(data.X.T @ data.y)) / data.n)
    if lam_max <= 0.0:
        raise ValueError("lambda_max is 0: outcome is orthogonal to every column")
    return np.geomspace(lam_max, lam_max * ratio, grid_size)


def _solve_path_arrays(
    X: NDArray[np.float64],
    y: NDArray[np.float64],
    lambdas: NDArray[np.float64],
    tol: float,
    max_iter: int,
    warm_start: bool,
) -> tuple[NDArray[np.float64], NDArray[np.int64], NDArray[np.bool_]]:
    """Path solve on raw arrays; shared with the weighted variant in baselines."""
    n, p = X.shape
    gram = np.ascontiguousarray(X.T @ X / n)
    xty = np.ascontiguousarray(X.T @ y / n)
    kkt_eps = max(tol / 10.0, 1e-12)

    betas = np.empty((lambdas.shape[0], p))
    iters = np.empty(lambdas.shape[0], dtype=np.int64)
    conv = np.empty(lambdas.shape[0], dtype=np.bool_)
    beta = np.zeros(p)
    for k, lam in enumerate(lambdas):
        if not warm_start:
            beta = np.zeros(p)
        it, ok = _cd_kernel(gram, xty, float(lam), beta, tol, max_iter, kkt_eps)
        betas[k] = beta
        iters[k] = it
        conv[k] = ok
    return betas, iters, conv


def cd_solve(
    data: StandardizedDataset | Dataset,
    lambdas: NDArray[np.float64],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    warm_start: bool = True,
) -> LassoPath:
    """Solve the penalized objective at every grid point.

    ``tol`` bounds the largest coefficient change in the final sweep;
    ``max_iter`` caps sweeps per grid point.  Grid points that hit the cap are
    flagged ``converged=False`` and a NoConvergenceWarning is emitted, but the
    path is still returned.

    Raises
    ------
    ValueError
        If the grid is not strictly decreasing and positive, or tol <= 0.
    """
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if lambdas.ndim != 1 or lambdas.shape[0] < 1:
        raise ValueError("lambdas must be a non-empty 1-d array")
    if np.any(lambdas <= 0.0):
        raise ValueError("penalties must be strictly positive")
    if lambdas.shape[0] > 1 and np.any(np.diff(lambdas) >= 0.0):
        raise ValueError("penalty grid must be strictly decreasing")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")

    betas, iters, conv = _solve_path_arrays(data.X, data.y, lambdas, tol, max_iter, warm_start)
    if not conv.all():
        bad = int((~conv).sum())
        warnings.warn(
            f"coordinate descent hit max_iter={max_iter} at {bad} grid point(s)",
            NoConvergenceWarning,
            stacklevel=2,
        )
    active = tuple(frozenset(int(j) for j in np.flatnonzero(row)) for row in betas)
    return LassoPath(
        lambdas=lambdas.copy(),
        betas=betas,
        active_sets=active,
        n_iters=iters,
        converged=conv,
    )


@dataclass(frozen=True)
class GicSelection:
    """One grid point chosen by the information criterion."""

    lambda_gic: float
    chosen_index: int
    gic_values: NDArray[np.float64]
    candidate_set: frozenset[int]


def gic_select(
    path: LassoPath,
    data: Dataset,
    *,
    p_total: int | None = None,
) -> GicSelection:
    """Pick the grid point minimizing  n*log(RSS/n) + |A|*log(log n)*log(p).

    |A| is the active-set cardinality at the grid point.  Ties go to the larger
    penalty (first minimum along the decreasing grid).  ``p_total`` overrides
    the feature count in the log(p) factor, for solvers run on a column subset
    of a wider problem.

    Raises
    ------
    DegenerateGic
        If n < 3 (log log n must be positive and finite).
    """
    n = data.n
    if n < 3:
        raise DegenerateGic(f"information criterion needs n >= 3, got {n}")
    p_eff = data.p if p_total is None else int(p_total)
    resid = data.y[None, :] - path.betas @ data.X.T
    rss = np.einsum("ki,ki->k", resid, resid)
    sizes = np.array([len(a) for a in path.active_sets], dtype=np.float64)
    mean_rss = np.maximum(rss / n, np.finfo(np.float64).tiny)
    gic = n * np.log(mean_rss) + sizes * np.log(np.log(n)) * np.log(p_eff)
    idx = int(np.argmin(gic))
    return GicSelection(
        lambda_gic=float(path.lambdas[idx]),
        chosen_index=idx,
        gic_values=gic,
        candidate_set=path.active_sets[idx],
    )
