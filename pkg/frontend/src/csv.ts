/** CSV loading for figure inputs: header-keyed rows plus column validation. */

import Papa from "papaparse";

export class DataError extends Error {}

export type Row = Record<string, string>;

export function parseCsv(text: string): Row[] {
  if (text.trim() === "") {
    throw new DataError("empty CSV: no content");
  }
  const result = Papa.parse<Row>(text, {
    header: true,
    skipEmptyLines: true,
  });
  const fatal = result.errors.filter((e) => e.type !== "FieldMismatch");
  if (fatal.length > 0) {
    throw new DataError(`malformed CSV: ${fatal[0]!.message}`);
  }
  if (!result.meta.fields || result.meta.fields.length === 0) {
    throw new DataError("empty CSV: no header row");
  }
  if (result.data.length === 0) {
    throw new DataError("empty CSV: header but no data rows");
  }
  return result.data;
}

export function requireColumns(rows: Row[], columns: string[]): void {
  const present = new Set(Object.keys(rows[0] ?? {}));
  const missing = columns.filter((c) => !present.has(c));
  if (missing.length > 0) {
    throw new DataError(`missing required columns: ${missing.join(", ")}`);
  }
}

export function numeric(row: Row, column: string): number {
  const raw = row[column];
  if (raw === undefined || raw === "") {
    throw new DataError(`missing value in column ${column}`);
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new DataError(`non-numeric value in column ${column}: ${raw}`);
  }
  return value;
}
