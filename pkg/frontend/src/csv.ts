import { readFileSync } from "node:fs";

export interface Table {
  header: string[];
  rows: string[][];
  path: string;
}

export class SchemaError extends Error {}

export function readCsv(path: string): Table {
  const text = readFileSync(path, "utf8").trim();
  if (text.length === 0) {
    throw new SchemaError(`${path}: empty CSV`);
  }
  const lines = text.split(/\r?\n/);
  const header = lines[0].split(",").map((s) => s.trim());
  const rows = lines.slice(1).map((line) => line.split(","));
  return { header, rows, path };
}

/** Column values as strings; raises a schema error naming a missing column. */
export function column(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(
      `${table.path}: missing column "${name}" (header: ${table.header.join(",")})`,
    );
  }
  return table.rows.map((row) => row[idx] ?? "");
}

export function numberColumn(table: Table, name: string): number[] {
  return column(table, name).map((value) => Number(value));
}

/** Row objects restricted to the requested columns. */
export function records(
  table: Table,
  names: string[],
): Record<string, string>[] {
  const cols = names.map((name) => column(table, name));
  return table.rows.map((_, i) => {
    const out: Record<string, string> = {};
    names.forEach((name, j) => (out[name] = cols[j][i]));
    return out;
  });
}

/** Read and concatenate several CSVs sharing the required columns. */
export function readAll(paths: string[], names: string[]): Record<string, string>[] {
  const out: Record<string, string>[] = [];
  for (const path of paths) {
    out.push(...records(readCsv(path), names));
  }
  return out;
}
