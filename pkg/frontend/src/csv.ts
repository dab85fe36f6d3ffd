/** Typed loaders for the experiment CSV outputs, with strict schema checks. */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class SchemaError extends Error {}

/** Expected header per plot kind; order-sensitive to match the writers. */
export const SCHEMAS: Record<string, string[]> = {
  cdf: ["epsilon", "cdf"],
  kde: ["sample_index", "error"],
  worst_case: ["n", "worst_case_error", "typical_median_error"],
  theory_ratio: ["n", "rho", "quadrature", "asymptotic", "ratio"],
};

export interface Table {
  path: string;
  columns: string[];
  /** column name -> numeric values */
  data: Record<string, number[]>;
}

export function readTable(path: string, expected: string[]): Table {
  const text = readFileSync(path, "utf-8");
  const parsed = Papa.parse<string[]>(text.trim(), { delimiter: "," });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${path}: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new SchemaError(`${path}: empty file`);
  }
  const header = rows[0];
  for (const col of expected) {
    if (!header.includes(col)) {
      throw new SchemaError(`${path}: missing column '${col}' (header: ${header.join(",")})`);
    }
  }
  for (const col of header) {
    if (!expected.includes(col)) {
      throw new SchemaError(`${path}: unexpected column '${col}'`);
    }
  }
  const data: Record<string, number[]> = {};
  for (const col of header) data[col] = [];
  for (let r = 1; r < rows.length; r++) {
    const row = rows[r];
    if (row.length === 1 && row[0] === "") continue; // trailing newline
    if (row.length !== header.length) {
      throw new SchemaError(`${path}: row ${r} has ${row.length} fields, expected ${header.length}`);
    }
    for (let c = 0; c < header.length; c++) {
      const v = Number(row[c]);
      if (!Number.isFinite(v)) {
        throw new SchemaError(`${path}: column '${header[c]}' row ${r} is not numeric: '${row[c]}'`);
      }
      data[header[c]].push(v);
    }
  }
  if (data[header[0]].length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return { path, columns: header, data };
}
