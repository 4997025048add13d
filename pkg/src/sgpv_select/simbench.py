"""Synthetic benchmark for support recovery: correlated Gaussian designs, sparse
true coefficient vectors, signal-calibrated noise, per-replication metrics, and
a deterministic multi-process experiment runner.

Reproducibility contract: replication r of a run with master seed m draws from
``default_rng(SeedSequence((m, r)))`` regardless of worker count, and the true
coefficient vector is fixed per scenario from its own seed, so results files
are byte-identical across worker counts.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from numpy.typing import NDArray

from .baselines import BaselineFit, adaptive_lasso_fit, lasso_gic_fit, oracle_ols
from .linalg import Dataset
from .select import SelectConfig, SelectionResult, fit_one_stage, fit_two_stage

DEFAULT_TEST_FRACTION = 0.4
DEFAULT_METHODS = ("prosgpv", "lasso", "alasso")
ALL_METHODS = ("prosgpv", "prosgpv1", "lasso", "alasso", "oracle")

# Column order of the per-replication results CSV.  Wall-clock runtime is
# deliberately absent: rows must be byte-identical across worker counts, so
# timing lives only in the JSON summary.
CSV_COLUMNS = (
    "n", "p", "s", "rho", "snr", "method", "rep",
    "captured", "power", "type1", "pfdr", "pfnr",
    "mae", "rel_mae", "test_rmse", "rel_rmse", "selected_size", "error",
)


@dataclass(frozen=True)
class ScenarioSpec:
    """One benchmark cell: problem shape, correlation, signal strength, seeds.

    ``snr`` is the signal-to-noise ratio nu = beta' Sigma beta / sigma^2; the
    noise variance is derived from it exactly.  ``beta0`` optionally pins the
    true coefficient vector instead of the equally-spaced construction (its
    nonzero count must then equal ``s``).
    """

    n: int
    p: int
    s: int
    rho: float = 0.0
    snr: float = 2.0
    reps: int = 1
    test_fraction: float = DEFAULT_TEST_FRACTION
    master_seed: int = 0
    beta_seed: int | None = None
    beta0: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"n must be >= 3, got {self.n}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if not (1 <= self.s <= self.p):
            raise ValueError(f"s must be in [1, p], got s={self.s}, p={self.p}")
        if not (0.0 <= self.rho < 1.0):
            raise ValueError(f"rho must be in [0, 1), got {self.rho}")
        if self.snr <= 0.0:
            raise ValueError(f"snr must be positive, got {self.snr}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if not (0.0 <= self.test_fraction < 1.0):
            raise ValueError(f"test_fraction must be in [0, 1), got {self.test_fraction}")
        if self.beta0 is not None:
            b = tuple(float(v) for v in self.beta0)
            if len(b) != self.p:
                raise ValueError(f"beta0 must have length p={self.p}, got {len(b)}")
            nz = sum(1 for v in b if v != 0.0)
            if nz != self.s:
                raise ValueError(f"beta0 has {nz} nonzeros but s={self.s}")
            object.__setattr__(self, "beta0", b)

    @property
    def effective_beta_seed(self) -> int:
        return self.master_seed if self.beta_seed is None else self.beta_seed


@dataclass(frozen=True)
class TrueModel:
    """Ground truth for one scenario: coefficients, support, noise variance."""

    beta0: NDArray[np.float64]
    support: tuple[int, ...]
    sigma2: float

    def __post_init__(self) -> None:
        b = np.asarray(self.beta0, dtype=np.float64)
        b.setflags(write=False)
        object.__setattr__(self, "beta0", b)


def ar1_design(n: int, p: int, rho: float, rng: np.random.Generator) -> NDArray[np.float64]:
    """Draw n i.i.d. rows from N_p(0, Sigma) with Sigma_ij = rho^|i-j|.

    Uses the AR(1) recursion x_1 = z_1, x_j = rho x_{j-1} + sqrt(1-rho^2) z_j,
    which realizes that covariance exactly without a p x p factorization.
    """
    if not (0.0 <= rho < 1.0):
        raise ValueError(f"rho must be in [0, 1), got {rho}")
    Z = rng.standard_normal((n, p))
    if rho == 0.0 or p == 1:
        return Z
    X = np.empty_like(Z)
    X[:, 0] = Z[:, 0]
    c = math.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + c * Z[:, j]
    return X


def _signal_variance(beta0: NDArray[np.float64], rho: float) -> float:
    """beta' Sigma beta for Sigma_ij = rho^|i-j|, summing over the support only."""
    support = np.flatnonzero(beta0)
    total = 0.0
    for a in support:
        for b in support:
            total += beta0[a] * beta0[b] * rho ** abs(int(a) - int(b))
    return float(total)


def make_beta(spec: ScenarioSpec, rng: np.random.Generator) -> TrueModel:
    """Construct the true coefficient vector and the matching noise variance.

    Unless ``spec.beta0`` pins the vector: s magnitudes equally spaced on
    [1, 5] (a single signal gets magnitude 1), signs alternating +,-,+,- in
    increasing-magnitude order (odd s gives ceil(s/2) positive), positions
    drawn uniformly without replacement.  sigma^2 = beta' Sigma beta / snr.
    """
    if spec.beta0 is not None:
        beta0 = np.array(spec.beta0, dtype=np.float64)
    else:
        s = spec.s
        if s == 1:
            magnitudes = np.array([1.0])
        else:
            magnitudes = 1.0 + 4.0 * np.arange(s) / (s - 1)
        signs = np.where(np.arange(s) % 2 == 0, 1.0, -1.0)
        positions = np.sort(rng.choice(spec.p, size=s, replace=False))
        beta0 = np.zeros(spec.p)
        beta0[positions] = signs * magnitudes
    sigma2 = _signal_variance(beta0, spec.rho) / spec.snr
    return TrueModel(
        beta0=beta0,
        support=tuple(int(j) for j in np.flatnonzero(beta0)),
        sigma2=sigma2,
    )


def gen_design(
    spec: ScenarioSpec, rng: np.random.Generator, n_rows: int | None = None
) -> NDArray[np.float64]:
    """Design draw for a scenario; ``n_rows`` overrides spec.n (train+test draws)."""
    return ar1_design(spec.n if n_rows is None else n_rows, spec.p, spec.rho, rng)


def gen_response(
    X: NDArray[np.float64], model: TrueModel, rng: np.random.Generator
) -> NDArray[np.float64]:
    """y = X beta0 + N(0, sigma2) noise."""
    X = np.asarray(X, dtype=np.float64)
    noise = rng.standard_normal(X.shape[0]) * math.sqrt(model.sigma2)
    return X @ model.beta0 + noise


def population_pve(snr: float) -> float:
    """Proportion of variance explained implied by the signal-to-noise ratio."""
    return snr / (1.0 + snr)


@dataclass(frozen=True)
class MetricsRecord:
    """Support-recovery and estimation metrics for one fit on one replication.

    Relative metrics are None when the oracle denominator is zero (reported as
    absent, never infinite).
    """

    captured: bool
    power: float
    type1: float
    pfdr: float
    pfnr: float
    mae: float
    relative_mae: float | None
    test_rmse: float
    relative_rmse: float | None
    selected_size: int
    runtime_seconds: float


FitLike = SelectionResult | BaselineFit


def eval_metrics(
    result: FitLike,
    model: TrueModel,
    test_data: Dataset,
    oracle: BaselineFit | None = None,
    runtime_seconds: float = 0.0,
) -> MetricsRecord:
    """Score one fit against the ground truth and a held-out test set.

    power = |S∩S0|/|S0|; type1 = |S\\S0|/(p-|S0|) (0 when p == |S0|);
    pfdr = |S\\S0|/max(|S|,1); pfnr = |S0\\S|/max(p-|S|,1); mae is the mean
    absolute coefficient error over all p slots (unselected = 0) on the
    original scale; test_rmse is prediction RMSE on ``test_data``.  Relative
    versions divide by the same quantity for ``oracle`` when given.
    """
    p = model.beta0.shape[0]
    s_hat = set(result.selected)
    s_true = set(model.support)
    s = len(s_true)

    true_pos = len(s_hat & s_true)
    false_pos = len(s_hat - s_true)
    false_neg = len(s_true - s_hat)

    captured = s_hat == s_true
    power = true_pos / s if s > 0 else 1.0
    type1 = false_pos / (p - s) if p > s else 0.0
    pfdr = false_pos / max(len(s_hat), 1)
    pfnr = false_neg / max(p - len(s_hat), 1)

    mae = float(np.mean(np.abs(result.coefficients - model.beta0)))
    resid = test_data.y - result.predict(test_data.X)
    test_rmse = float(np.sqrt(np.mean(resid**2)))

    relative_mae: float | None = None
    relative_rmse: float | None = None
    if oracle is not None:
        oracle_mae = float(np.mean(np.abs(oracle.coefficients - model.beta0)))
        oresid = test_data.y - oracle.predict(test_data.X)
        oracle_rmse = float(np.sqrt(np.mean(oresid**2)))
        if oracle_mae > 0.0:
            relative_mae = mae / oracle_mae
        if oracle_rmse > 0.0:
            relative_rmse = test_rmse / oracle_rmse

    return MetricsRecord(
        captured=captured,
        power=power,
        type1=type1,
        pfdr=pfdr,
        pfnr=pfnr,
        mae=mae,
        relative_mae=relative_mae,
        test_rmse=test_rmse,
        relative_rmse=relative_rmse,
        selected_size=len(s_hat),
        runtime_seconds=runtime_seconds,
    )


def _fit_method(
    method: str, train: Dataset, config: SelectConfig, model: TrueModel
) -> FitLike:
    if method == "prosgpv":
        return fit_two_stage(train, config)
    if method == "prosgpv1":
        return fit_one_stage(train, config)
    if method == "lasso":
        return lasso_gic_fit(train, config)
    if method == "alasso":
        return adaptive_lasso_fit(train, config)
    if method == "oracle":
        return oracle_ols(train, model.support)
    raise ValueError(f"unknown method {method!r}")


def rep_rng(spec: ScenarioSpec, rep: int) -> np.random.Generator:
    """The replication-r stream: counter-mode derivation from (master_seed, r)."""
    return np.random.default_rng(np.random.SeedSequence((spec.master_seed, rep)))


def scenario_model(spec: ScenarioSpec) -> TrueModel:
    """The scenario's fixed ground truth (same for every replication)."""
    rng = np.random.default_rng(np.random.SeedSequence((spec.effective_beta_seed,)))
    return make_beta(spec, rng)


def _total_rows(spec: ScenarioSpec) -> int:
    if spec.test_fraction == 0.0:
        return spec.n
    return int(math.ceil(spec.n / (1.0 - spec.test_fraction)))


def run_replication(
    spec: ScenarioSpec,
    rep: int,
    methods: Sequence[str],
    config: SelectConfig,
    model: TrueModel,
) -> list[dict[str, Any]]:
    """Run every method on one fresh draw; one row dict per method.

    Method failures are recorded in the row's ``error`` field (metrics blank)
    and never abort the replication.
    """
    rng = rep_rng(spec, rep)
    n_total = _total_rows(spec)
    X = gen_design(spec, rng, n_rows=n_total)
    y = gen_response(X, model, rng)
    names = tuple(f"V{j + 1}" for j in range(spec.p))
    train = Dataset(y=y[: spec.n], X=X[: spec.n], column_names=names)
    if n_total > spec.n:
        test = Dataset(y=y[spec.n :], X=X[spec.n :], column_names=names)
    else:
        test = train

    try:
        oracle = oracle_ols(train, model.support)
    except Exception:
        oracle = None

    rows: list[dict[str, Any]] = []
    base = {
        "n": spec.n, "p": spec.p, "s": spec.s, "rho": spec.rho,
        "snr": spec.snr, "rep": rep,
    }
    for method in methods:
        row: dict[str, Any] = dict(base, method=method)
        t0 = time.perf_counter()
        try:
            fit = _fit_method(method, train, config, model)
            runtime = time.perf_counter() - t0
            rec = eval_metrics(fit, model, test, oracle=oracle, runtime_seconds=runtime)
            row.update(
                captured=rec.captured,
                power=rec.power,
                type1=rec.type1,
                pfdr=rec.pfdr,
                pfnr=rec.pfnr,
                mae=rec.mae,
                rel_mae=rec.relative_mae,
                test_rmse=rec.test_rmse,
                rel_rmse=rec.relative_rmse,
                selected_size=rec.selected_size,
                runtime_seconds=rec.runtime_seconds,
                error="",
            )
        except Exception as exc:
            row.update(
                captured=None, power=None, type1=None, pfdr=None, pfnr=None,
                mae=None, rel_mae=None, test_rmse=None, rel_rmse=None,
                selected_size=None, runtime_seconds=time.perf_counter() - t0,
                error=f"{type(exc).__name__}: {exc}",
            )
        rows.append(row)
    return rows


@dataclass(frozen=True)
class ExperimentResult:
    """All per-replication rows plus per-method aggregates for one scenario."""

    spec: ScenarioSpec
    methods: tuple[str, ...]
    rows: tuple[dict[str, Any], ...]
    summary: dict[str, Any] = field(compare=False)


def _wald_interval(rate: float, count: int) -> tuple[float, float]:
    half = 1.96 * math.sqrt(rate * (1.0 - rate) / count) if count > 0 else 0.0
    return rate - half, rate + half


def _quartiles(values: list[float]) -> dict[str, float | None]:
    if not values:
        return {"q1": None, "median": None, "q3": None}
    q1, med, q3 = np.percentile(values, [25.0, 50.0, 75.0])
    return {"q1": float(q1), "median": float(med), "q3": float(q3)}


def _summarize_method(method: str, rows: list[dict[str, Any]]) -> dict[str, Any]:
    ok = [r for r in rows if not r["error"]]
    out: dict[str, Any] = {
        "method": method,
        "reps": len(rows),
        "n_failed": len(rows) - len(ok),
    }
    if ok:
        capture = float(np.mean([1.0 if r["captured"] else 0.0 for r in ok]))
        lo, hi = _wald_interval(capture, len(ok))
        out["capture_rate"] = capture
        out["capture_wald_lo"] = lo
        out["capture_wald_hi"] = hi
        for key in ("power", "type1", "pfdr", "pfnr", "selected_size"):
            out[f"{key}_mean"] = float(np.mean([r[key] for r in ok]))
        for key in ("mae", "rel_mae", "test_rmse", "rel_rmse"):
            vals = [r[key] for r in ok if r[key] is not None]
            out[key] = _quartiles(vals)
        out["runtime_mean_s"] = float(np.mean([r["runtime_seconds"] for r in ok]))
    else:
        out["capture_rate"] = None
    return out


def _worker_rows(args: tuple[ScenarioSpec, int, tuple[str, ...], SelectConfig, TrueModel]):
    return run_replication(*args)


def run_experiment(
    spec: ScenarioSpec,
    methods: Sequence[str] = DEFAULT_METHODS,
    config: SelectConfig | None = None,
    workers: int = 1,
) -> ExperimentResult:
    """Run all replications of one scenario, optionally across processes.

    Rows come back ordered by (replication, method) no matter how many workers
    ran them, so serialized output is worker-count independent.
    """
    methods = tuple(methods)
    unknown = [m for m in methods if m not in ALL_METHODS]
    if unknown:
        raise ValueError(f"unknown methods: {unknown}; choose from {ALL_METHODS}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    cfg = config or SelectConfig()
    model = scenario_model(spec)

    if workers == 1 or spec.reps == 1:
        per_rep = [run_replication(spec, r, methods, cfg, model) for r in range(spec.reps)]
    else:
        tasks = [(spec, r, methods, cfg, model) for r in range(spec.reps)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_rep = list(pool.map(_worker_rows, tasks, chunksize=max(1, spec.reps // (4 * workers))))

    rows = tuple(row for rep_rows in per_rep for row in rep_rows)
    summary = {
        "scenario": {
            "n": spec.n, "p": spec.p, "s": spec.s, "rho": spec.rho, "snr": spec.snr,
            "reps": spec.reps, "test_fraction": spec.test_fraction,
            "master_seed": spec.master_seed, "beta_seed": spec.effective_beta_seed,
        },
        "true_support": list(model.support),
        "population_pve": population_pve(spec.snr),
        "methods": [
            _summarize_method(m, [r for r in rows if r["method"] == m]) for m in methods
        ],
    }
    return ExperimentResult(spec=spec, methods=methods, rows=rows, summary=summary)


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        # float() strips numpy scalar types, whose repr is not a plain literal.
        return repr(float(value))
    return str(value)


def rows_to_csv(rows: Sequence[dict[str, Any]], out: io.TextIOBase) -> None:
    """Serialize result rows in the documented column order (header included)."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_format_cell(row.get(col)) for col in CSV_COLUMNS])


def write_results_csv(rows: Sequence[dict[str, Any]], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        rows_to_csv(rows, fh)


def write_summary_json(summary: Any, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=False)
        fh.write("\n")
