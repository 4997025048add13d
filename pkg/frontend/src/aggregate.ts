/**
 * Per-cell aggregation of result rows into plottable series.
 *
 * Lines are per-method summaries against one scenario axis; bands carry
 * uncertainty. Capture is a per-replication 0/1 event, so its band is the
 * 95% Wald interval of the rate. The remaining metrics are continuous, so
 * their line is the median and the band the first/third quartiles. The
 * metric fixes the band: asking for Wald bands on a continuous metric (or
 * quartiles on capture) is a spec error, not a style choice.
 */

import type { ResultRow } from "./csv.js";

export const METRICS = [
  "capture", "rel_mae", "rel_rmse", "power", "type1", "pfdr", "pfnr",
] as const;
export type Metric = (typeof METRICS)[number];

export const AXES = ["n", "p"] as const;
export type Axis = (typeof AXES)[number];

export const FACET_DIMS = ["n", "p", "s", "rho", "snr"] as const;
export type FacetDim = (typeof FACET_DIMS)[number];

export type Band = "wald" | "quartiles";

export interface SeriesPoint {
  x: number;
  y: number;
  lo: number;
  hi: number;
  /** replications that produced a value at this cell */
  reps: number;
}

export interface Series {
  method: string;
  points: SeriesPoint[];
}

export interface Panel {
  /** facet coordinate, e.g. { rho: 0.35, snr: 2 } */
  facet: Record<string, number>;
  series: Series[];
}

export interface AggregateSpec {
  metric: Metric;
  x: Axis;
  facets: FacetDim[];
  band: Band;
}

export function defaultBand(metric: Metric): Band {
  return metric === "capture" ? "wald" : "quartiles";
}

export function checkPairing(metric: Metric, band: Band): void {
  if (band !== defaultBand(metric)) {
    throw new Error(
      `metric '${metric}' pairs with band '${defaultBand(metric)}', not '${band}'`,
    );
  }
}

export function checkSpec(spec: AggregateSpec): void {
  if (!METRICS.includes(spec.metric)) {
    throw new Error(`unknown metric '${spec.metric}'; choose from ${METRICS.join(", ")}`);
  }
  if (!AXES.includes(spec.x)) {
    throw new Error(`x axis must be one of ${AXES.join(", ")}, got '${spec.x}'`);
  }
  for (const dim of spec.facets) {
    if (!FACET_DIMS.includes(dim)) {
      throw new Error(`unknown facet dimension '${dim}'`);
    }
    if (dim === spec.x) {
      throw new Error(`'${dim}' cannot be both the x axis and a facet`);
    }
  }
  if (new Set(spec.facets).size !== spec.facets.length) {
    throw new Error("facet dimensions must be distinct");
  }
  if (spec.facets.length > 2) {
    throw new Error("at most two facet dimensions (columns, rows)");
  }
  checkPairing(spec.metric, spec.band);
}

/** Metric value of one row, or null when the row cannot contribute. */
function metricValue(row: ResultRow, metric: Metric): number | null {
  if (row.error !== "") return null;
  if (metric === "capture") return row.captured === null ? null : row.captured ? 1 : 0;
  return row[metric];
}

function quantile(sorted: number[], q: number): number {
  // Linear interpolation between order statistics, matching the producer.
  const h = (sorted.length - 1) * q;
  const lo = Math.floor(h);
  const hi = Math.ceil(h);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (h - lo);
}

function summarize(values: number[], band: Band): Omit<SeriesPoint, "x"> {
  if (band === "wald") {
    const rate = values.reduce((a, b) => a + b, 0) / values.length;
    const half = 1.96 * Math.sqrt((rate * (1 - rate)) / values.length);
    return {
      y: rate,
      lo: Math.max(0, rate - half),
      hi: Math.min(1, rate + half),
      reps: values.length,
    };
  }
  const sorted = [...values].sort((a, b) => a - b);
  return {
    y: quantile(sorted, 0.5),
    lo: quantile(sorted, 0.25),
    hi: quantile(sorted, 0.75),
    reps: values.length,
  };
}

/**
 * Group rows into facet panels of per-method series along the x axis.
 *
 * Methods keep their order of first appearance; panels sort row-major by the
 * facet values (first facet fastest); points sort by x. Throws when nothing
 * survives filtering.
 */
export function aggregate(rows: ResultRow[], spec: AggregateSpec): Panel[] {
  checkSpec(spec);

  const cells = new Map<string, { facet: Record<string, number>; method: string; x: number; values: number[] }>();
  const methodOrder: string[] = [];
  for (const row of rows) {
    const value = metricValue(row, spec.metric);
    if (value === null) continue;
    const facet: Record<string, number> = {};
    for (const dim of spec.facets) facet[dim] = row[dim];
    const key = JSON.stringify([spec.facets.map((d) => facet[d]), row.method, row[spec.x]]);
    let cell = cells.get(key);
    if (!cell) {
      cell = { facet, method: row.method, x: row[spec.x], values: [] };
      cells.set(key, cell);
      if (!methodOrder.includes(row.method)) methodOrder.push(row.method);
    }
    cell.values.push(value);
  }
  if (cells.size === 0) {
    throw new Error(`empty selection: no usable rows for metric '${spec.metric}'`);
  }

  const facetKey = (f: Record<string, number>) => spec.facets.map((d) => f[d]).join("|");
  const panels = new Map<string, Panel>();
  for (const cell of cells.values()) {
    const key = facetKey(cell.facet);
    let panel = panels.get(key);
    if (!panel) {
      panel = { facet: cell.facet, series: [] };
      panels.set(key, panel);
    }
    let series = panel.series.find((s) => s.method === cell.method);
    if (!series) {
      series = { method: cell.method, points: [] };
      panel.series.push(series);
    }
    series.points.push({ x: cell.x, ...summarize(cell.values, spec.band) });
  }

  const ordered = [...panels.values()];
  // Row-major layout order: last facet dimension changes slowest.
  ordered.sort((a, b) => {
    for (let i = spec.facets.length - 1; i >= 0; i--) {
      const d = spec.facets[i];
      if (a.facet[d] !== b.facet[d]) return a.facet[d] - b.facet[d];
    }
    return 0;
  });
  for (const panel of ordered) {
    panel.series.sort(
      (a, b) => methodOrder.indexOf(a.method) - methodOrder.indexOf(b.method),
    );
    for (const series of panel.series) {
      series.points.sort((a, b) => a.x - b.x);
    }
  }
  return ordered;
}
