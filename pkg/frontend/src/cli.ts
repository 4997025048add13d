#!/usr/bin/env node
/**
 * plotkit --input results.csv --metric capture --x n --facets rho,snr --out fig.svg
 *
 * Output is SVG only: this build has no rasterizer, so raster extensions are
 * rejected up front instead of silently writing a mislabeled file.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";
import * as path from "node:path";

import { defaultBand, METRICS } from "./aggregate.js";
import type { Axis, Band, FacetDim, Metric } from "./aggregate.js";
import { parseResultsCsv } from "./csv.js";
import { buildFigure, renderSvg } from "./figure.js";

const USAGE =
  "usage: plotkit --input results.csv [--metric capture] [--x n] " +
  "[--facets rho,snr] [--band wald|quartiles] [--title text] --out fig.svg";

export function run(argv: string[]): number {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        input: { type: "string" },
        metric: { type: "string", default: "capture" },
        x: { type: "string", default: "n" },
        facets: { type: "string", default: "rho,snr" },
        band: { type: "string" },
        title: { type: "string" },
        out: { type: "string" },
        help: { type: "boolean", default: false },
      },
    }));
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    console.error(USAGE);
    return 2;
  }
  if (values.help) {
    console.log(USAGE);
    return 0;
  }

  try {
    if (!values.input) throw new Error("--input is required");
    if (!values.out) throw new Error("--out is required");
    const ext = path.extname(values.out).toLowerCase();
    if (ext !== ".svg") {
      throw new Error(
        `unsupported output extension '${ext}': this build renders SVG only, use a .svg path`,
      );
    }

    const metric = values.metric as Metric;
    const spec = {
      metric,
      x: values.x as Axis,
      facets: values.facets === "" ? [] : (values.facets!.split(",") as FacetDim[]),
      band: (values.band as Band | undefined) ?? defaultBand(metric),
      title: values.title,
    };
    if (!METRICS.includes(metric)) {
      throw new Error(`unknown metric '${values.metric}'; choose from ${METRICS.join(", ")}`);
    }

    const rows = parseResultsCsv(readFileSync(values.input, "utf-8"));
    const model = buildFigure(rows, spec);
    writeFileSync(values.out, renderSvg(model), "utf-8");
    console.log(
      `wrote ${values.out} (${model.panels.length} panel(s), ` +
        `${model.methods.length} method(s))`,
    );
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

const entry = process.argv[1] ? path.resolve(process.argv[1]) : "";
if (entry && import.meta.url === `file://${entry}`) {
  process.exit(run(process.argv.slice(2)));
}
