"""Command line front end: fit models on a CSV file, run one synthetic
benchmark scenario, or sweep a grid of scenarios.

Flags can also come from a JSON config file (``--config``); explicit command
line flags win over config values.  Worker count resolves as flag > config >
``SGPV_SELECT_WORKERS`` env var > 1.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .baselines import adaptive_lasso_fit, lasso_gic_fit
from .errors import NonNumericColumn, OutcomeMissing, SelectionError
from .linalg import Dataset
from .select import NULL_BOUND_VARIANTS, SelectConfig, fit_one_stage, fit_two_stage
from .simbench import (
    DEFAULT_METHODS,
    DEFAULT_TEST_FRACTION,
    ExperimentResult,
    ScenarioSpec,
    run_experiment,
    write_results_csv,
    write_summary_json,
)

log = logging.getLogger("sgpv_select")

_MISSING_TOKENS = {"", "na", "nan", "null", "none"}
_FIT_METHODS = ("prosgpv", "prosgpv1", "lasso", "alasso")


def _parse_methods(value: str) -> tuple[str, ...]:
    if value == "all":
        return _FIT_METHODS
    methods = tuple(m.strip() for m in value.split(",") if m.strip())
    bad = [m for m in methods if m not in _FIT_METHODS]
    if bad:
        raise argparse.ArgumentTypeError(
            f"unknown method(s) {bad}; choose from {_FIT_METHODS + ('all',)}"
        )
    if not methods:
        raise argparse.ArgumentTypeError("at least one method required")
    return methods


def _int_list(value: Any) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(v) for v in str(value).split(",") if str(v).strip()]


def _float_list(value: Any) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).split(",") if str(v).strip()]


def load_table(path: str | Path, outcome: str) -> tuple[Dataset, int]:
    """Read a CSV file (header row required, numeric cells) into a Dataset.

    Rows with any missing cell are dropped listwise; the count is logged.
    Raises OutcomeMissing if the outcome column is absent and NonNumericColumn
    if a cell is neither a number nor a missing-value token.
    """
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        raw_rows = [row for row in reader if any(cell.strip() for cell in row)]
    if header is None or not any(h.strip() for h in header):
        raise ValueError(f"{path}: missing header row")
    header = [h.strip() for h in header]
    if outcome not in header:
        raise OutcomeMissing(f"outcome column {outcome!r} not found in {path}")
    if len(header) < 2:
        raise ValueError(f"{path}: need at least one feature column besides {outcome!r}")

    values = np.empty((len(raw_rows), len(header)))
    for j, name in enumerate(header):
        for i, row in enumerate(raw_rows):
            cell = row[j].strip() if j < len(row) else ""
            if cell.lower() in _MISSING_TOKENS:
                values[i, j] = np.nan
            else:
                try:
                    values[i, j] = float(cell)
                except ValueError:
                    raise NonNumericColumn(name) from None

    keep = ~np.isnan(values).any(axis=1)
    dropped = int((~keep).sum())
    if dropped:
        log.warning("dropped %d row(s) with missing values from %s", dropped, path)
    values = values[keep]
    if values.shape[0] == 0:
        raise ValueError(f"{path}: no complete rows after dropping missing values")

    y_idx = header.index(outcome)
    feat_idx = [j for j in range(len(header)) if j != y_idx]
    return (
        Dataset(
            y=values[:, y_idx],
            X=values[:, feat_idx],
            column_names=tuple(header[j] for j in feat_idx),
        ),
        dropped,
    )


def _select_config(opts: dict[str, Any]) -> SelectConfig:
    kwargs: dict[str, Any] = {}
    if opts.get("null_bound") is not None:
        kwargs["null_bound_variant"] = opts["null_bound"]
    for key in ("grid_size", "cd_tol", "cd_max_iter"):
        if opts.get(key) is not None:
            kwargs[key] = opts[key]
    return SelectConfig(**kwargs)


def _fit_one(method: str, data: Dataset, config: SelectConfig) -> dict[str, Any]:
    if method == "prosgpv":
        res = fit_two_stage(data, config)
    elif method == "prosgpv1":
        res = fit_one_stage(data, config)
    elif method == "lasso":
        res = lasso_gic_fit(data, config)
    else:
        res = adaptive_lasso_fit(data, config)

    out: dict[str, Any] = {
        "selected": [data.column_names[j] for j in res.selected],
        "intercept": res.intercept,
        "coefficients": {
            data.column_names[j]: float(res.coefficients[j]) for j in res.selected
        },
    }
    if hasattr(res, "stage1_candidates"):
        out["ses"] = {
            name: float(se) for name, se in zip(res.selected_names, res.refit.se)
        }
        out["stage1_candidates"] = [data.column_names[j] for j in res.stage1_candidates]
        out["stage1_lambda"] = res.stage1_lambda
        if res.sgpv is not None:
            out["null_bound"] = res.null_bound_value
            out["p_values"] = {
                data.column_names[j]: float(p)
                for j, p in zip(res.stage1_candidates, res.sgpv.p_values)
            }
    else:
        out["lambda_gic"] = res.lambda_gic
    return out


def _split_rows(
    data: Dataset,
    methods: Sequence[str],
    config: SelectConfig,
    splits: int,
    train_frac: float,
    seed: int,
) -> list[dict[str, Any]]:
    """Repeated random train/test splits; per-split selection and test error."""
    if not (0.0 < train_frac < 1.0):
        raise ValueError(f"train fraction must be in (0, 1), got {train_frac}")
    n_train = int(round(train_frac * data.n))
    if n_train < 3 or n_train >= data.n:
        raise ValueError(
            f"train fraction {train_frac} leaves an unusable split of {data.n} rows"
        )
    rows = []
    for split in range(splits):
        rng = np.random.default_rng(np.random.SeedSequence((seed, split)))
        perm = rng.permutation(data.n)
        tr, te = perm[:n_train], perm[n_train:]
        train = Dataset(y=data.y[tr], X=data.X[tr], column_names=data.column_names)
        test = Dataset(y=data.y[te], X=data.X[te], column_names=data.column_names)
        for method in methods:
            row: dict[str, Any] = {"split": split, "method": method}
            try:
                report = _fit_one(method, train, config)
                coef = np.zeros(data.p)
                for name, val in report["coefficients"].items():
                    coef[data.column_names.index(name)] = val
                pred = report["intercept"] + test.X @ coef
                row["test_rmse"] = float(np.sqrt(np.mean((test.y - pred) ** 2)))
                row["selected_size"] = len(report["selected"])
                row["selected"] = report["selected"]
                row["error"] = ""
            except Exception as exc:
                row.update(test_rmse=None, selected_size=None, selected=[],
                           error=f"{type(exc).__name__}: {exc}")
            rows.append(row)
    return rows


def cmd_fit(opts: dict[str, Any]) -> int:
    if not opts.get("data"):
        raise ValueError("fit needs --data (or a 'data' config entry)")
    if not opts.get("outcome"):
        raise ValueError("fit needs --outcome (or an 'outcome' config entry)")
    data, dropped = load_table(opts["data"], opts["outcome"])
    config = _select_config(opts)
    methods = opts["method"]

    report: dict[str, Any] = {
        "command": "fit",
        "input": str(opts["data"]),
        "outcome": opts["outcome"],
        "rows_used": data.n,
        "rows_dropped": dropped,
        "null_bound": opts.get("null_bound") or "sebar",
    }

    splits = opts.get("splits")
    if splits:
        rows = _split_rows(
            data, methods, config, int(splits),
            float(opts.get("train_frac") or 0.7), int(opts.get("seed") or 0),
        )
        report["splits"] = rows
        by_method: dict[str, Any] = {}
        for method in methods:
            ok = [r for r in rows if r["method"] == method and not r["error"]]
            rmses = [r["test_rmse"] for r in ok]
            freq: dict[str, int] = {}
            for r in ok:
                for name in r["selected"]:
                    freq[name] = freq.get(name, 0) + 1
            by_method[method] = {
                "splits_ok": len(ok),
                "test_rmse_median": float(np.median(rmses)) if rmses else None,
                "test_rmse_q1": float(np.percentile(rmses, 25)) if rmses else None,
                "test_rmse_q3": float(np.percentile(rmses, 75)) if rmses else None,
                "selected_size_mean": (
                    float(np.mean([r["selected_size"] for r in ok])) if ok else None
                ),
                "selection_frequency": {
                    k: v / len(ok) for k, v in sorted(freq.items())
                } if ok else {},
            }
        report["split_summary"] = by_method
    else:
        report["methods"] = {m: _fit_one(m, data, config) for m in methods}

    out = opts.get("out")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
        if splits:
            for method, agg in report["split_summary"].items():
                print(f"{method}: median test RMSE {agg['test_rmse_median']} "
                      f"over {agg['splits_ok']} splits")
        else:
            for method, res in report["methods"].items():
                print(f"{method}: selected {res['selected'] or '(none)'}")
        print(f"report written to {out}")
    else:
        json.dump(report, sys.stdout, indent=2)
        print()
    return 0


def _scenario_from_opts(opts: dict[str, Any], **overrides: Any) -> ScenarioSpec:
    # Overlay before coercion: sweep passes per-cell values while the raw
    # opts still hold comma lists that int()/float() would choke on.
    merged = {**opts, **overrides}
    beta0 = merged.get("beta0")
    return ScenarioSpec(
        n=int(merged["n"]), p=int(merged["p"]), s=int(merged["s"]),
        rho=float(merged.get("rho") or 0.0),
        snr=float(merged["snr"]) if merged.get("snr") is not None else 2.0,
        reps=int(merged.get("reps") or 1),
        test_fraction=(
            float(merged["test_fraction"])
            if merged.get("test_fraction") is not None
            else DEFAULT_TEST_FRACTION
        ),
        master_seed=int(merged.get("master_seed", merged.get("seed") or 0)),
        beta0=tuple(float(v) for v in beta0) if beta0 is not None else None,
    )


def _echo_summary(result: ExperimentResult) -> None:
    for m in result.summary["methods"]:
        rate = m["capture_rate"]
        shown = "n/a" if rate is None else f"{rate:.3f}"
        print(f"{m['method']}: capture rate {shown} "
              f"({m['reps'] - m['n_failed']}/{m['reps']} reps ok)")


def cmd_simulate(opts: dict[str, Any]) -> int:
    for key in ("n", "p", "s"):
        if opts.get(key) is None:
            raise ValueError(f"simulate needs --{key}")
    spec = _scenario_from_opts(opts)
    result = run_experiment(
        spec, methods=opts["method"], config=_select_config(opts),
        workers=opts["workers"],
    )
    out_dir = Path(opts.get("out") or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results_csv(result.rows, str(out_dir / "results.csv"))
    write_summary_json(result.summary, str(out_dir / "summary.json"))
    _echo_summary(result)
    print(f"wrote {out_dir / 'results.csv'} and {out_dir / 'summary.json'}")
    return 0


def cmd_sweep(opts: dict[str, Any]) -> int:
    for key in ("n", "p", "s"):
        if opts.get(key) is None:
            raise ValueError(f"sweep needs --{key}")
    ns = _int_list(opts["n"])
    ps = _int_list(opts["p"])
    ss = _int_list(opts["s"])
    rhos = _float_list(opts["rho"]) if opts.get("rho") is not None else [0.0]
    snrs = _float_list(opts["snr"]) if opts.get("snr") is not None else [2.0]

    cells = list(itertools.product(ns, ps, ss, rhos, snrs))
    all_rows: list[dict[str, Any]] = []
    summaries: list[dict[str, Any]] = []
    failures = 0
    for idx, (n, p, s, rho, snr) in enumerate(cells):
        try:
            # Distinct master seed per cell so cells draw independent streams.
            spec = _scenario_from_opts(
                opts, n=n, p=p, s=s, rho=rho, snr=snr,
                master_seed=int(opts.get("seed") or 0) + idx,
            )
            result = run_experiment(
                spec, methods=opts["method"], config=_select_config(opts),
                workers=opts["workers"],
            )
            all_rows.extend(result.rows)
            summaries.append(result.summary)
            log.info("cell %d/%d done: n=%d p=%d s=%d rho=%g snr=%g",
                     idx + 1, len(cells), n, p, s, rho, snr)
        except Exception as exc:
            failures += 1
            summaries.append({
                "scenario": {"n": n, "p": p, "s": s, "rho": rho, "snr": snr},
                "error": f"{type(exc).__name__}: {exc}",
            })
            log.error("cell %d/%d failed: %s", idx + 1, len(cells), exc)

    out_dir = Path(opts.get("out") or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    write_results_csv(all_rows, str(out_dir / "results.csv"))
    write_summary_json(
        {"cells": summaries, "n_cells": len(cells), "n_cell_failures": failures},
        str(out_dir / "summary.json"),
    )
    print(f"{len(cells)} cell(s), {failures} failed; "
          f"wrote {out_dir / 'results.csv'} and {out_dir / 'summary.json'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgpv-select",
        description="Two-stage variable selection for linear models, with benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp: argparse.ArgumentParser, default_method: str) -> None:
        sp.add_argument("--method", type=_parse_methods, default=None,
                        help=f"comma list from {_FIT_METHODS} or 'all' "
                             f"(default {default_method})")
        sp.add_argument("--null-bound", choices=NULL_BOUND_VARIANTS, default=None,
                        help="null region half-width variant (default sebar)")
        sp.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        sp.add_argument("--out", default=None, help="output path (fit) or directory")
        sp.add_argument("--config", default=None,
                        help="JSON file with defaults for any flag; flags win")

    fit = sub.add_parser("fit", help="fit selection methods to a CSV data file")
    fit.add_argument("--data", default=None, help="input CSV (header row required)")
    fit.add_argument("--outcome", default=None, help="name of the outcome column")
    fit.add_argument("--splits", type=int, default=None,
                     help="evaluate over this many random train/test splits")
    fit.add_argument("--train-frac", type=float, default=None,
                     help="train fraction for --splits (default 0.7)")
    add_common(fit, "prosgpv")

    def add_scenario_flags(sp: argparse.ArgumentParser, list_ok: bool) -> None:
        kind = " (comma list ok)" if list_ok else ""
        typ = str if list_ok else int
        ftyp = str if list_ok else float
        sp.add_argument("--n", type=typ, default=None, help="training rows" + kind)
        sp.add_argument("--p", type=typ, default=None, help="number of variables" + kind)
        sp.add_argument("--s", type=typ, default=None, help="true support size" + kind)
        sp.add_argument("--rho", type=ftyp, default=None,
                        help="AR(1) correlation in [0,1)" + kind)
        sp.add_argument("--snr", type=ftyp, default=None, help="signal-to-noise" + kind)
        sp.add_argument("--reps", type=int, default=None, help="replications (default 1)")
        sp.add_argument("--test-fraction", type=float, default=None,
                        help="held-out fraction of the draw (default 0.4)")
        sp.add_argument("--workers", type=int, default=None,
                        help="process count (default SGPV_SELECT_WORKERS or 1)")

    sim = sub.add_parser("simulate", help="run one synthetic benchmark scenario")
    add_scenario_flags(sim, list_ok=False)
    add_common(sim, "prosgpv,lasso,alasso")

    sweep = sub.add_parser("sweep", help="run a grid of scenarios (comma lists)")
    add_scenario_flags(sweep, list_ok=True)
    add_common(sweep, "prosgpv,lasso,alasso")

    return parser


def _merge_opts(args: argparse.Namespace) -> dict[str, Any]:
    """Start from the config file (if any), overlay explicit CLI flags."""
    opts: dict[str, Any] = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError(f"{args.config}: config must be a JSON object")
        opts.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            opts[key] = value
    if isinstance(opts.get("method"), str):
        opts["method"] = _parse_methods(opts["method"])
    elif opts.get("method") is None:
        opts["method"] = DEFAULT_METHODS if args.command != "fit" else ("prosgpv",)
    if opts.get("workers") is None:
        env = os.environ.get("SGPV_SELECT_WORKERS")
        opts["workers"] = int(env) if env else 1
    else:
        opts["workers"] = int(opts["workers"])
    return opts


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _merge_opts(args)
        if args.command == "fit":
            return cmd_fit(opts)
        if args.command == "simulate":
            return cmd_simulate(opts)
        return cmd_sweep(opts)
    except (SelectionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
