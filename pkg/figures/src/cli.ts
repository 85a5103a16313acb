#!/usr/bin/env node
/**
 * uavnoma-render: turn simulator CSVs into static SVG figures.
 *
 *   render --kind coverage --in fig2.csv --out fig2.svg
 *   render --kind outage   --in fig4.csv --out fig4.svg
 *   render --kind sumrate  --in fig5_10dbm.csv --in fig5_20dbm.csv --in fig5_30dbm.csv --out fig5.svg
 *
 * Options: --no-band (skip scanning-band shading), --ceiling <bpcu> (sum-rate
 * reference line, default 6.5), --title <text>.
 * Exit codes: 0 ok, 1 bad usage or input (nothing is written), 2 unexpected failure.
 */

import { writeFileSync } from "node:fs";
import { resolve } from "node:path";
import { fileURLToPath } from "node:url";
import { parseArgs } from "node:util";

import { CsvError, readCsv } from "./csv.js";
import { FigureKind, renderFigure } from "./figures.js";

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        in: { type: "string", multiple: true },
        out: { type: "string" },
        band: { type: "boolean", default: true },
        "no-band": { type: "boolean", default: false },
        ceiling: { type: "string", default: "6.5" },
        title: { type: "string" },
      },
      allowPositionals: true,
    });
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  const { values, positionals } = parsed;
  if (positionals.length > 1 || (positionals.length === 1 && positionals[0] !== "render")) {
    console.error(`error: unexpected arguments: ${positionals.join(" ")}`);
    return 1;
  }
  const kind = values.kind as FigureKind | undefined;
  if (!kind || !["coverage", "outage", "sumrate"].includes(kind)) {
    console.error("error: --kind must be one of coverage, outage, sumrate");
    return 1;
  }
  const inputs = values.in ?? [];
  if (inputs.length === 0 || !values.out) {
    console.error("error: need at least one --in <csv> and an --out <svg>");
    return 1;
  }
  const ceiling = Number(values.ceiling);
  if (!Number.isFinite(ceiling) || ceiling <= 0) {
    console.error(`error: --ceiling must be a positive number, got '${values.ceiling}'`);
    return 1;
  }

  try {
    const tables = inputs.map((path) => readCsv(path));
    const svg = renderFigure({
      kind,
      inputs: tables,
      band: values.band && !values["no-band"],
      ceiling,
      title: values.title,
    });
    writeFileSync(values.out, svg, "utf8");
    console.error(`wrote ${values.out}`);
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`unexpected failure: ${(err as Error).message}`);
    return 2;
  }
}

if (process.argv[1] !== undefined && resolve(process.argv[1]) === fileURLToPath(import.meta.url)) {
  process.exit(main(process.argv.slice(2)));
}
