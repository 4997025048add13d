/**
 * Figure layout and SVG serialization.
 *
 * The figure model carries both data and pixel coordinates so tests can
 * check the mapping without rasterizing anything. Rendering is deterministic:
 * fixed panel geometry, fixed palette keyed by method order, no jitter, and
 * coordinates written with a fixed number of decimals.
 */

import { aggregate } from "./aggregate.js";
import type { AggregateSpec, Panel, SeriesPoint } from "./aggregate.js";
import type { ResultRow } from "./csv.js";

export interface FigureSpec extends AggregateSpec {
  title?: string;
}

const PANEL_W = 240;
const PANEL_H = 190;
const GAP = 14;
const MARGIN = { left: 64, right: 18, top: 58, bottom: 50 };
const RATE_METRICS = new Set(["capture", "power", "type1", "pfdr", "pfnr"]);
const PALETTE = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

export interface LinearScale {
  domain: [number, number];
  range: [number, number];
  apply(v: number): number;
  invert(px: number): number;
}

export function linearScale(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    domain,
    range,
    apply: (v) => r0 + ((v - d0) / span) * (r1 - r0),
    invert: (px) => d0 + ((px - r0) / (r1 - r0)) * span,
  };
}

/** Tick positions at a 1/2/5 step covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) return [lo];
  const rawStep = (hi - lo) / Math.max(1, count - 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag * 10;
  for (const m of [1, 2, 5]) {
    if (mag * m >= rawStep) {
      step = mag * m;
      break;
    }
  }
  // Integer multiples of the step, snapped to short decimals so repeated
  // addition noise never leaks into labels or equality checks.
  const ticks: number[] = [];
  const kLast = Math.floor(hi / step + 1e-9);
  for (let k = Math.ceil(lo / step - 1e-9); k <= kLast; k++) {
    ticks.push(Number((k * step).toFixed(10)));
  }
  return ticks;
}

export interface PlacedPoint extends SeriesPoint {
  px: number;
  py: number;
  pyLo: number;
  pyHi: number;
}

export interface PlacedSeries {
  method: string;
  color: string;
  points: PlacedPoint[];
}

export interface PlacedPanel {
  facet: Record<string, number>;
  label: string;
  /** pixel offset of the panel's plotting area */
  x0: number;
  y0: number;
  series: PlacedSeries[];
}

export interface FigureModel {
  spec: FigureSpec;
  width: number;
  height: number;
  columns: number;
  rows: number;
  xScale: LinearScale;
  yScale: LinearScale;
  xTicks: number[];
  yTicks: number[];
  panels: PlacedPanel[];
  methods: { method: string; color: string }[];
}

function formatNumber(v: number): string {
  // Axis/legend labels: trim float noise without scientific notation.
  const s = Number(v.toFixed(6)).toString();
  return s;
}

function facetLabel(facet: Record<string, number>): string {
  const parts = Object.entries(facet).map(([k, v]) => `${k}=${formatNumber(v)}`);
  return parts.join(", ");
}

/** Aggregate rows and lay the panels out on a shared pair of scales. */
export function buildFigure(rows: ResultRow[], spec: FigureSpec): FigureModel {
  const panels = aggregate(rows, spec);

  const columnValues = new Set<number>();
  const rowValues = new Set<number>();
  for (const panel of panels) {
    if (spec.facets.length > 0) columnValues.add(panel.facet[spec.facets[0]]);
    if (spec.facets.length > 1) rowValues.add(panel.facet[spec.facets[1]]);
  }
  const columns = Math.max(1, columnValues.size);
  const gridRows = Math.max(1, rowValues.size);

  const xs: number[] = [];
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const panel of panels) {
    for (const series of panel.series) {
      for (const pt of series.points) {
        xs.push(pt.x);
        yLo = Math.min(yLo, pt.lo);
        yHi = Math.max(yHi, pt.hi);
      }
    }
  }
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const xPad = (xMax - xMin || 1) * 0.05;

  let yDomain: [number, number];
  let yTicks: number[];
  if (RATE_METRICS.has(spec.metric)) {
    yDomain = [0, 1];
    yTicks = [0, 0.25, 0.5, 0.75, 1];
  } else {
    const pad = (yHi - yLo || 1) * 0.05;
    yDomain = [Math.max(0, yLo - pad), yHi + pad];
    yTicks = niceTicks(yDomain[0], yDomain[1]);
  }

  const xScale = linearScale([xMin - xPad, xMax + xPad], [0, PANEL_W]);
  const yScale = linearScale(yDomain, [PANEL_H, 0]);
  const xTicks = [...new Set(xs)].sort((a, b) => a - b);

  const methodColor = new Map<string, string>();
  for (const panel of panels) {
    for (const series of panel.series) {
      if (!methodColor.has(series.method)) {
        methodColor.set(series.method, PALETTE[methodColor.size % PALETTE.length]);
      }
    }
  }

  const colOf = (panel: Panel) =>
    spec.facets.length > 0
      ? [...columnValues].sort((a, b) => a - b).indexOf(panel.facet[spec.facets[0]])
      : 0;
  const rowOf = (panel: Panel) =>
    spec.facets.length > 1
      ? [...rowValues].sort((a, b) => a - b).indexOf(panel.facet[spec.facets[1]])
      : 0;

  const placed: PlacedPanel[] = panels.map((panel) => {
    const x0 = MARGIN.left + colOf(panel) * (PANEL_W + GAP);
    const y0 = MARGIN.top + rowOf(panel) * (PANEL_H + GAP + 22);
    return {
      facet: panel.facet,
      label: facetLabel(panel.facet),
      x0,
      y0,
      series: panel.series.map((series) => ({
        method: series.method,
        color: methodColor.get(series.method)!,
        points: series.points.map((pt) => ({
          ...pt,
          px: xScale.apply(pt.x),
          py: yScale.apply(pt.y),
          pyLo: yScale.apply(pt.lo),
          pyHi: yScale.apply(pt.hi),
        })),
      })),
    };
  });

  return {
    spec,
    width: MARGIN.left + columns * PANEL_W + (columns - 1) * GAP + MARGIN.right,
    height: MARGIN.top + gridRows * (PANEL_H + 22) + (gridRows - 1) * GAP + MARGIN.bottom - 22,
    columns,
    rows: gridRows,
    xScale,
    yScale,
    xTicks,
    yTicks,
    panels: placed,
    methods: [...methodColor.entries()].map(([method, color]) => ({ method, color })),
  };
}

const px = (v: number) => v.toFixed(2);

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Serialize the model to a standalone SVG document. */
export function renderSvg(model: FigureModel): string {
  const { spec } = model;
  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${model.width}" height="${model.height}" ` +
      `viewBox="0 0 ${model.width} ${model.height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  out.push(`<rect width="${model.width}" height="${model.height}" fill="white"/>`);

  const title = spec.title ?? `${spec.metric} vs ${spec.x}`;
  out.push(
    `<text x="${px(MARGIN.left)}" y="20" font-size="14" font-weight="bold">${esc(title)}</text>`,
  );

  // legend: one swatch per method on a single line under the title
  let lx = MARGIN.left;
  for (const { method, color } of model.methods) {
    out.push(`<line x1="${px(lx)}" y1="36" x2="${px(lx + 22)}" y2="36" stroke="${color}" stroke-width="2"/>`);
    out.push(`<text x="${px(lx + 27)}" y="40" font-size="11">${esc(method)}</text>`);
    lx += 27 + 8 * method.length + 24;
  }

  for (const panel of model.panels) {
    out.push(`<g transform="translate(${px(panel.x0)},${px(panel.y0)})">`);
    out.push(`<rect width="${PANEL_W}" height="${PANEL_H}" fill="none" stroke="#999" stroke-width="0.8"/>`);
    out.push(
      `<text x="${px(PANEL_W / 2)}" y="-6" font-size="11" text-anchor="middle">${esc(panel.label)}</text>`,
    );

    for (const t of model.yTicks) {
      const y = model.yScale.apply(t);
      out.push(`<line x1="0" y1="${px(y)}" x2="${PANEL_W}" y2="${px(y)}" stroke="#eee" stroke-width="0.6"/>`);
      out.push(
        `<text x="-6" y="${px(y + 3)}" font-size="9" text-anchor="end">${formatNumber(t)}</text>`,
      );
    }
    for (const t of model.xTicks) {
      const x = model.xScale.apply(t);
      out.push(`<line x1="${px(x)}" y1="${PANEL_H}" x2="${px(x)}" y2="${PANEL_H + 4}" stroke="#666" stroke-width="0.8"/>`);
      out.push(
        `<text x="${px(x)}" y="${PANEL_H + 15}" font-size="9" text-anchor="middle">${formatNumber(t)}</text>`,
      );
    }

    for (const series of panel.series) {
      if (series.points.length > 1) {
        const upper = series.points.map((p) => `${px(p.px)},${px(p.pyHi)}`);
        const lower = [...series.points].reverse().map((p) => `${px(p.px)},${px(p.pyLo)}`);
        out.push(
          `<polygon points="${upper.concat(lower).join(" ")}" fill="${series.color}" fill-opacity="0.18" stroke="none"/>`,
        );
      }
      const line = series.points.map((p) => `${px(p.px)},${px(p.py)}`).join(" ");
      out.push(
        `<polyline points="${line}" fill="none" stroke="${series.color}" stroke-width="1.8"/>`,
      );
      for (const p of series.points) {
        out.push(`<circle cx="${px(p.px)}" cy="${px(p.py)}" r="2.2" fill="${series.color}"/>`);
      }
    }
    out.push(`</g>`);
  }

  const lastRowY = MARGIN.top + model.rows * (PANEL_H + 22) + (model.rows - 1) * GAP - 22;
  out.push(
    `<text x="${px(MARGIN.left + (model.width - MARGIN.left - MARGIN.right) / 2)}" ` +
      `y="${px(lastRowY + 36)}" font-size="12" text-anchor="middle">${esc(spec.x)}</text>`,
  );
  out.push(
    `<text x="14" y="${px(MARGIN.top + PANEL_H / 2)}" font-size="12" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${px(MARGIN.top + PANEL_H / 2)})">${esc(spec.metric)}</text>`,
  );

  out.push(`</svg>`);
  return out.join("\n") + "\n";
}

/** Convenience: aggregate, lay out, and serialize in one call. */
export function renderFigure(rows: ResultRow[], spec: FigureSpec): string {
  return renderSvg(buildFigure(rows, spec));
}
