/**
 * Reader for the benchmark results CSV contract.
 *
 * One row per (replication, method). Metric cells are empty when that
 * replication failed for that method; `error` then carries the reason.
 */

import Papa from "papaparse";

export const RESULT_COLUMNS = [
  "n", "p", "s", "rho", "snr", "method", "rep",
  "captured", "power", "type1", "pfdr", "pfnr",
  "mae", "rel_mae", "test_rmse", "rel_rmse", "selected_size", "error",
] as const;

export interface ResultRow {
  n: number;
  p: number;
  s: number;
  rho: number;
  snr: number;
  method: string;
  rep: number;
  captured: boolean | null;
  power: number | null;
  type1: number | null;
  pfdr: number | null;
  pfnr: number | null;
  mae: number | null;
  rel_mae: number | null;
  test_rmse: number | null;
  rel_rmse: number | null;
  selected_size: number | null;
  error: string;
}

function parseNumber(cell: string, column: string, line: number): number | null {
  if (cell === "") return null;
  const value = Number(cell);
  if (!Number.isFinite(value)) {
    throw new Error(`line ${line}: column '${column}' has non-numeric value '${cell}'`);
  }
  return value;
}

function requireNumber(cell: string, column: string, line: number): number {
  const value = parseNumber(cell, column, line);
  if (value === null) {
    throw new Error(`line ${line}: column '${column}' must not be empty`);
  }
  return value;
}

function parseFlag(cell: string, line: number): boolean | null {
  if (cell === "") return null;
  if (cell === "true") return true;
  if (cell === "false") return false;
  throw new Error(`line ${line}: column 'captured' has non-boolean value '${cell}'`);
}

/** Parse CSV text; throws when the column contract is not met. */
export function parseResultsCsv(text: string): ResultRow[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: true,
  });
  // Diagnose a wrong header before any row-level noise.
  const fields = parsed.meta.fields ?? [];
  const missing = RESULT_COLUMNS.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new Error(`missing column(s): ${missing.join(", ")}`);
  }
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`CSV parse error: ${first.message} (row ${first.row})`);
  }

  return parsed.data.map((rec, i) => {
    const line = i + 2; // 1-based, after the header row
    return {
      n: requireNumber(rec.n, "n", line),
      p: requireNumber(rec.p, "p", line),
      s: requireNumber(rec.s, "s", line),
      rho: requireNumber(rec.rho, "rho", line),
      snr: requireNumber(rec.snr, "snr", line),
      method: rec.method,
      rep: requireNumber(rec.rep, "rep", line),
      captured: parseFlag(rec.captured, line),
      power: parseNumber(rec.power, "power", line),
      type1: parseNumber(rec.type1, "type1", line),
      pfdr: parseNumber(rec.pfdr, "pfdr", line),
      pfnr: parseNumber(rec.pfnr, "pfnr", line),
      mae: parseNumber(rec.mae, "mae", line),
      rel_mae: parseNumber(rec.rel_mae, "rel_mae", line),
      test_rmse: parseNumber(rec.test_rmse, "test_rmse", line),
      rel_rmse: parseNumber(rec.rel_rmse, "rel_rmse", line),
      selected_size: parseNumber(rec.selected_size, "selected_size", line),
      error: rec.error,
    };
  });
}
