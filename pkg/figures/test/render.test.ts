import assert from "node:assert/strict";
import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { test } from "node:test";
import { fileURLToPath } from "node:url";

import { main } from "../src/cli.js";
import { readCsv } from "../src/csv.js";
import { renderCoverage, renderFigure, renderOutage, renderSumRate } from "../src/figures.js";
import { niceTicks } from "../src/svg.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "..", "test", "fixtures");

const fixture = (name: string) => join(FIXTURES, name);
const load = (name: string) => readCsv(fixture(name));

function svgSanity(svg: string): void {
  assert.ok(svg.startsWith("<svg "));
  assert.ok(svg.trimEnd().endsWith("</svg>"));
  assert.ok(svg.includes("<polyline"));
  assert.ok(svg.includes("altitude (m)"));
}

test("nice ticks cover the span with 1-2-5 steps", () => {
  const ticks = niceTicks(0, 100);
  assert.ok(ticks.length >= 3 && ticks.length <= 8);
  assert.equal(ticks[0], 0);
  assert.ok(ticks[ticks.length - 1]! <= 100);
});

test("coverage figure is a dual-axis chart", () => {
  const svg = renderCoverage({ kind: "coverage", inputs: [load("fig2_coverage.csv")], band: true, ceiling: 6.5 });
  svgSanity(svg);
  assert.ok(svg.includes("required vertical angle (deg)"));
  assert.ok(svg.includes("radiated area (%)"));
});

test("outage figure draws four curves and the scanning band", () => {
  const svg = renderOutage({ kind: "outage", inputs: [load("fig4_sweep.csv")], band: true, ceiling: 6.5 });
  svgSanity(svg);
  assert.ok(svg.includes("NOMA weak user"));
  assert.ok(svg.includes("OMA strong user"));
  assert.ok(svg.includes("beam scanning"));
  assert.ok(svg.includes("outage probability"));
});

test("sum-rate figure overlays three power levels with the ceiling line", () => {
  const inputs = ["fig5_10dbm.csv", "fig5_20dbm.csv", "fig5_30dbm.csv"].map(load);
  const svg = renderSumRate({ kind: "sumrate", inputs, band: true, ceiling: 6.5 });
  svgSanity(svg);
  assert.ok(svg.includes("6.5 BPCU ceiling"));
  assert.ok(svg.includes("NOMA [fig5_10dbm]"));
  assert.ok(svg.includes("OMA [fig5_30dbm]"));
  // three inputs, two curves each
  assert.equal((svg.match(/<polyline/g) ?? []).length >= 6, true);
});

test("close-in sweeps render through the same sum-rate path", () => {
  const inputs = ["fig6_40dbm.csv", "fig6_50dbm.csv", "fig6_60dbm.csv"].map(load);
  const svg = renderSumRate({ kind: "sumrate", inputs, band: true, ceiling: 6.5 });
  svgSanity(svg);
});

test("band shading can be disabled", () => {
  const spec = { kind: "outage" as const, inputs: [load("fig4_sweep.csv")], band: false, ceiling: 6.5 };
  assert.ok(!renderFigure(spec).includes("beam scanning"));
});

test("rendering is deterministic", () => {
  const spec = { kind: "sumrate" as const, inputs: [load("fig5_20dbm.csv")], band: true, ceiling: 6.5 };
  assert.equal(renderFigure(spec), renderFigure(spec));
});

test("schema mismatch is rejected before anything is written", () => {
  assert.throws(
    () => renderOutage({ kind: "outage", inputs: [load("fig2_coverage.csv")], band: true, ceiling: 6.5 }),
    /does not match/,
  );
});

test("cli renders every figure kind end to end", () => {
  const dir = mkdtempSync(join(tmpdir(), "uavnoma-figures-"));
  const cases: [string, string[]][] = [
    ["fig2.svg", ["--kind", "coverage", "--in", fixture("fig2_coverage.csv")]],
    ["fig4.svg", ["--kind", "outage", "--in", fixture("fig4_sweep.csv")]],
    [
      "fig5.svg",
      [
        "--kind", "sumrate",
        "--in", fixture("fig5_10dbm.csv"),
        "--in", fixture("fig5_20dbm.csv"),
        "--in", fixture("fig5_30dbm.csv"),
      ],
    ],
    [
      "fig6.svg",
      [
        "--kind", "sumrate",
        "--in", fixture("fig6_40dbm.csv"),
        "--in", fixture("fig6_50dbm.csv"),
        "--in", fixture("fig6_60dbm.csv"),
      ],
    ],
  ];
  for (const [name, args] of cases) {
    const out = join(dir, name);
    assert.equal(main(["render", ...args, "--out", out]), 0, name);
    const svg = readFileSync(out, "utf8");
    svgSanity(svg);
  }
});

test("cli exits 1 on wrong schema and writes nothing", () => {
  const dir = mkdtempSync(join(tmpdir(), "uavnoma-figures-"));
  const out = join(dir, "bad.svg");
  const code = main(["render", "--kind", "outage", "--in", fixture("scan50.csv"), "--out", out]);
  assert.equal(code, 1);
  assert.ok(!existsSync(out));
});

test("cli exits 1 on usage errors", () => {
  assert.equal(main(["render", "--kind", "mystery", "--in", "x.csv", "--out", "y.svg"]), 1);
  assert.equal(main(["render", "--kind", "outage"]), 1);
  assert.equal(main(["render", "--kind", "sumrate", "--in", "x.csv", "--out", "y.svg", "--ceiling", "-2"]), 1);
});

test("cli exits 1 on a missing input file", () => {
  const dir = mkdtempSync(join(tmpdir(), "uavnoma-figures-"));
  const out = join(dir, "missing.svg");
  assert.equal(main(["render", "--kind", "outage", "--in", fixture("nope.csv"), "--out", out]), 1);
  assert.ok(!existsSync(out));
});
