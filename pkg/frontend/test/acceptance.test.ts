/**
 * Gate for the shipped sweep fixture: the capture figure must come straight
 * from the CSV, panel for panel, with independently recomputed aggregates.
 */

import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { parseResultsCsv } from "../src/csv.js";
import type { ResultRow } from "../src/csv.js";
import { buildFigure, renderSvg } from "../src/figure.js";
import type { FigureSpec } from "../src/figure.js";

const FIXTURE = fileURLToPath(new URL("../fixtures/desk_sweep.csv", import.meta.url));

const spec: FigureSpec = {
  metric: "capture",
  x: "n",
  facets: ["rho", "snr"],
  band: "wald",
};

function loadRows(): ResultRow[] {
  return parseResultsCsv(readFileSync(FIXTURE, "utf-8"));
}

/** capture rate recomputed directly from the raw rows */
function captureRate(
  rows: ResultRow[],
  method: string,
  n: number,
  rho: number,
  snr: number,
): { rate: number; reps: number } {
  const cell = rows.filter(
    (r) =>
      r.method === method && r.n === n && r.rho === rho && r.snr === snr && r.error === "",
  );
  const rate = cell.reduce((acc, r) => acc + (r.captured ? 1 : 0), 0) / cell.length;
  return { rate, reps: cell.length };
}

describe("shipped sweep fixture", () => {
  const rows = loadRows();
  const model = buildFigure(rows, spec);

  it("has the full 18-cell grid", () => {
    expect(rows).toHaveLength(5400);
    expect(new Set(rows.map((r) => r.method)).size).toBe(3);
  });

  it("renders a 3 x 2 facet grid with one banded line per method", () => {
    expect(model.columns).toBe(3);
    expect(model.rows).toBe(2);
    expect(model.panels).toHaveLength(6);
    for (const panel of model.panels) {
      expect(panel.series.map((s) => s.method)).toEqual(["prosgpv", "lasso", "alasso"]);
      for (const series of panel.series) {
        expect(series.points).toHaveLength(3);
        for (const pt of series.points) {
          expect(pt.reps).toBe(100);
          expect(pt.lo).toBeGreaterThanOrEqual(0);
          expect(pt.hi).toBeLessThanOrEqual(1);
          expect(pt.lo).toBeLessThanOrEqual(pt.y);
          expect(pt.y).toBeLessThanOrEqual(pt.hi);
        }
      }
    }
  });

  it("matches independently recomputed aggregates at five spot-checked points", () => {
    const checks: [string, number, number, number][] = [
      ["prosgpv", 100, 0, 0.7],
      ["prosgpv", 300, 0.7, 2],
      ["lasso", 200, 0.35, 2],
      ["alasso", 300, 0, 0.7],
      ["lasso", 100, 0.7, 0.7],
    ];
    for (const [method, n, rho, snr] of checks) {
      const want = captureRate(rows, method, n, rho, snr);
      const panel = model.panels.find(
        (p) => p.facet.rho === rho && p.facet.snr === snr,
      );
      expect(panel, `panel rho=${rho} snr=${snr}`).toBeDefined();
      const point = panel!.series
        .find((s) => s.method === method)!
        .points.find((p) => p.x === n)!;
      expect(point.y).toBeCloseTo(want.rate, 12);
      expect(point.reps).toBe(want.reps);
      const half = 1.96 * Math.sqrt((want.rate * (1 - want.rate)) / want.reps);
      expect(point.lo).toBeCloseTo(Math.max(0, want.rate - half), 12);
      expect(point.hi).toBeCloseTo(Math.min(1, want.rate + half), 12);
      // the drawn pixel encodes the same value
      expect(model.yScale.invert(point.py)).toBeCloseTo(want.rate, 9);
    }
  });

  it("serializes without error and carries every series", () => {
    const svg = renderSvg(model);
    expect(svg.startsWith("<svg")).toBe(true);
    expect((svg.match(/<polyline /g) ?? []).length).toBe(18);
    expect((svg.match(/<polygon /g) ?? []).length).toBe(18);
    for (const method of ["prosgpv", "lasso", "alasso"]) {
      expect(svg).toContain(`>${method}</text>`);
    }
  });
});
