/**
 * Schema-checked reader for the simulator's CSV files.
 *
 * Every file starts with `# schema=<id>` followed by a header row; columns are
 * addressed by name so column order is free to evolve within a schema version.
 */

import { readFileSync } from "node:fs";

export const SWEEP_SCHEMA = "uavnoma.sweep.v1";
export const COVERAGE_SCHEMA = "uavnoma.coverage.v1";
export const SCAN_SCHEMA = "uavnoma.scan.v1";

export class CsvError extends Error {}

export interface Table {
  schema: string;
  columns: string[];
  /** column name -> numeric values, one entry per data row */
  data: Map<string, number[]>;
  rows: number;
  path: string;
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${path}: empty file`);
  }
  const schemaLine = lines[0]!;
  const match = /^#\s*schema=(\S+)\s*$/.exec(schemaLine);
  if (!match) {
    throw new CsvError(`${path}: first line must be '# schema=<id>', got '${schemaLine}'`);
  }
  const schema = match[1]!;
  if (lines.length < 2) {
    throw new CsvError(`${path}: missing header row`);
  }
  const columns = lines[1]!.split(",");
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 2; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== columns.length) {
      throw new CsvError(`${path}: row ${i - 1} has ${cells.length} cells, expected ${columns.length}`);
    }
    for (let c = 0; c < columns.length; c++) {
      const value = Number(cells[c]);
      if (!Number.isFinite(value)) {
        throw new CsvError(`${path}: row ${i - 1}, column '${columns[c]}': not a number: '${cells[c]}'`);
      }
      data.get(columns[c]!)!.push(value);
    }
  }
  const rows = lines.length - 2;
  if (rows === 0) {
    throw new CsvError(`${path}: no data rows`);
  }
  return { schema, columns, data, rows, path };
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(`${path}: cannot read: ${(err as Error).message}`);
  }
  return parseCsv(text, path);
}

/** Assert the table's schema id and the presence of the columns a figure needs. */
export function requireTable(table: Table, schema: string, needed: string[]): void {
  if (table.schema !== schema) {
    throw new CsvError(`${table.path}: schema '${table.schema}' does not match expected '${schema}'`);
  }
  for (const column of needed) {
    if (!table.data.has(column)) {
      throw new CsvError(`${table.path}: missing column '${column}'`);
    }
  }
}

export function column(table: Table, name: string): number[] {
  const values = table.data.get(name);
  if (values === undefined) {
    throw new CsvError(`${table.path}: missing column '${name}'`);
  }
  return values;
}
