import * as fs from "node:fs";
import Papa from "papaparse";

/** A parsed CSV row: column name to number or string. */
export type Row = Record<string, number | string>;

/**
 * Read and parse a CSV artifact with a header line.
 *
 * Numbers are typed eagerly so renderers can consume cells directly.
 * Throws "missing-input" when the file does not exist and
 * "schema-mismatch" when the content is empty or malformed.
 */
export function readCsv(path: string): Row[] {
  if (!fs.existsSync(path)) {
    throw new Error(`missing-input: ${path} does not exist`);
  }
  const text = fs.readFileSync(path, "utf-8");
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`schema-mismatch: ${path} row ${first.row}: ${first.message}`);
  }
  if (parsed.data.length === 0) {
    throw new Error(`schema-mismatch: ${path} has no data rows`);
  }
  return parsed.data;
}

/** Assert that every named column is present in the rows. */
export function requireColumns(rows: Row[], columns: string[], kind: string): void {
  const present = new Set(Object.keys(rows[0]));
  const missing = columns.filter((c) => !present.has(c));
  if (missing.length > 0) {
    throw new Error(
      `schema-mismatch: ${kind} input lacks column(s) ${missing.join(", ")}`
    );
  }
}

/** Read a numeric cell, rejecting non-numeric content. */
export function num(row: Row, column: string): number {
  const value = row[column];
  if (typeof value !== "number" || !Number.isFinite(value)) {
    throw new Error(`schema-mismatch: column ${column} holds non-numeric ${value}`);
  }
  return value;
}

/** Distinct values of a column in first-appearance order. */
export function seriesNames(rows: Row[], column: string): string[] {
  const names: string[] = [];
  for (const row of rows) {
    const name = String(row[column]);
    if (!names.includes(name)) names.push(name);
  }
  return names;
}
