import assert from "node:assert/strict";
import { test } from "node:test";

import { CsvError, SWEEP_SCHEMA, column, parseCsv, requireTable } from "../src/csv.js";

const GOOD = [
  "# schema=uavnoma.sweep.v1",
  "h_m,noma_rate_bpcu",
  "10.0,6.4",
  "20.0,6.2",
  "",
].join("\n");

test("parses schema, header, and rows", () => {
  const table = parseCsv(GOOD, "good.csv");
  assert.equal(table.schema, SWEEP_SCHEMA);
  assert.deepEqual(table.columns, ["h_m", "noma_rate_bpcu"]);
  assert.equal(table.rows, 2);
  assert.deepEqual(column(table, "h_m"), [10.0, 20.0]);
});

test("rejects a missing schema line", () => {
  assert.throws(() => parseCsv("h_m\n10.0\n"), CsvError);
});

test("rejects an empty file and a header-only file", () => {
  assert.throws(() => parseCsv(""), CsvError);
  assert.throws(() => parseCsv("# schema=uavnoma.sweep.v1\nh_m\n"), /no data rows/);
});

test("rejects ragged rows and non-numeric cells", () => {
  assert.throws(() => parseCsv("# schema=s\na,b\n1.0\n"), /expected 2/);
  assert.throws(() => parseCsv("# schema=s\na,b\n1.0,x\n"), /not a number/);
});

test("requireTable checks schema id and needed columns", () => {
  const table = parseCsv(GOOD, "good.csv");
  requireTable(table, SWEEP_SCHEMA, ["h_m"]);
  assert.throws(() => requireTable(table, "uavnoma.coverage.v1", ["h_m"]), /does not match/);
  assert.throws(() => requireTable(table, SWEEP_SCHEMA, ["missing_col"]), /missing column/);
});
