/**
 * The three figure kinds the simulator's CSVs support.
 *
 * coverage  - dual axis: required vertical angle (deg, left) and radiated-area
 *             percentage (right) vs altitude; one coverage CSV per curve pair.
 * outage    - per-user outage probabilities (log scale) vs altitude from one
 *             or more sweep CSVs.
 * sumrate   - NOMA and OMA outage sum rates vs altitude from one or more sweep
 *             CSVs, with the target-rate ceiling as a reference line.
 *
 * Sweep-based figures shade the scanning band: the altitudes whose rows have
 * coverage below 100 % (the beam cannot cover the whole region there).
 */

import { basename } from "node:path";

import { COVERAGE_SCHEMA, SWEEP_SCHEMA, Table, column, requireTable } from "./csv.js";
import { Chart, linearScale, log10Scale } from "./svg.js";

export type FigureKind = "coverage" | "outage" | "sumrate";

export interface FigureSpec {
  kind: FigureKind;
  inputs: Table[];
  /** shade the scanning band (sweep figures only) */
  band: boolean;
  /** sum-rate ceiling reference (BPCU) */
  ceiling: number;
  title?: string;
}

const PALETTE = ["#1f6fb2", "#d1495b", "#3a8f5c", "#8461b8", "#c97b22", "#4d4d4d"];
const OUTAGE_FLOOR = 1e-4; // log-scale floor; zero estimates are clipped out

function shortLabel(table: Table): string {
  return basename(table.path).replace(/\.csv$/i, "");
}

function altitudeScale(chart: Chart, tables: Table[]) {
  const all = tables.flatMap((t) => column(t, "h_m"));
  return linearScale(Math.min(...all), Math.max(...all), chart.plotLeft, chart.plotRight);
}

/** Contiguous altitude stretches whose rows are below full coverage. */
function scanningBands(table: Table): [number, number][] {
  const h = column(table, "h_m");
  const pct = column(table, "coverage_pct");
  const bands: [number, number][] = [];
  let start: number | null = null;
  for (let i = 0; i < h.length; i++) {
    const scanning = pct[i]! < 100.0 - 1e-9;
    if (scanning && start === null) start = h[i]!;
    if (!scanning && start !== null) {
      bands.push([start, h[i - 1]!]);
      start = null;
    }
  }
  if (start !== null) bands.push([start, h[h.length - 1]!]);
  return bands;
}

function drawBands(chart: Chart, xScale: ReturnType<typeof linearScale>, table: Table): void {
  for (const [x0, x1] of scanningBands(table)) {
    chart.bandX(xScale, x0, x1, "beam scanning");
  }
}

export function renderCoverage(spec: FigureSpec): string {
  const chart = new Chart();
  chart.title(spec.title ?? "Vertical angle to cover the user region and radiated area");
  for (const table of spec.inputs) {
    requireTable(table, COVERAGE_SCHEMA, ["h_m", "phi_r_deg", "coverage_pct"]);
  }
  const xScale = altitudeScale(chart, spec.inputs);
  const phiMax = Math.max(...spec.inputs.flatMap((t) => column(t, "phi_r_deg")));
  const left = linearScale(0, phiMax * 1.08, chart.plotBottom, chart.plotTop);
  const right = linearScale(0, 105, chart.plotBottom, chart.plotTop);
  chart.gridY(left);
  spec.inputs.forEach((table, n) => {
    const h = column(table, "h_m");
    const label = spec.inputs.length > 1 ? ` [${shortLabel(table)}]` : "";
    chart.series(
      { x: h, y: column(table, "phi_r_deg"), color: PALETTE[(2 * n) % PALETTE.length]!, label: `required angle (deg)${label}` },
      xScale, left,
    );
    chart.series(
      { x: h, y: column(table, "coverage_pct"), color: PALETTE[(2 * n + 1) % PALETTE.length]!, label: `radiated area (%)${label}`, dash: "5,3" },
      xScale, right,
    );
  });
  chart.xAxis(xScale, "altitude (m)");
  chart.yAxis(left, "required vertical angle (deg)", "left");
  chart.yAxis(right, "radiated area (%)", "right");
  return chart.render();
}

export function renderOutage(spec: FigureSpec): string {
  const chart = new Chart();
  chart.title(spec.title ?? "Outage probability vs altitude");
  const needed = ["h_m", "coverage_pct", "p_out_noma_i", "p_out_noma_j", "p_out_oma_i", "p_out_oma_j"];
  for (const table of spec.inputs) {
    requireTable(table, SWEEP_SCHEMA, needed);
  }
  const xScale = altitudeScale(chart, spec.inputs);
  const yScale = log10Scale(OUTAGE_FLOOR, 1.0, chart.plotBottom, chart.plotTop);
  if (spec.band) drawBands(chart, xScale, spec.inputs[0]!);
  chart.gridY(yScale);
  const curves: [string, string][] = [
    ["p_out_noma_i", "NOMA weak user"],
    ["p_out_noma_j", "NOMA strong user"],
    ["p_out_oma_i", "OMA weak user"],
    ["p_out_oma_j", "OMA strong user"],
  ];
  for (const table of spec.inputs) {
    const h = column(table, "h_m");
    const suffix = spec.inputs.length > 1 ? ` [${shortLabel(table)}]` : "";
    curves.forEach(([col, label], c) => {
      chart.series(
        {
          x: h,
          y: column(table, col),
          color: PALETTE[c % PALETTE.length]!,
          label: `${label}${suffix}`,
          dash: c >= 2 ? "5,3" : undefined,
          clipBelow: OUTAGE_FLOOR,
        },
        xScale, yScale,
      );
    });
  }
  chart.xAxis(xScale, "altitude (m)");
  chart.yAxis(yScale, "outage probability", "left", true);
  return chart.render();
}

export function renderSumRate(spec: FigureSpec): string {
  const chart = new Chart();
  chart.title(spec.title ?? "Outage sum rate vs altitude");
  const needed = ["h_m", "coverage_pct", "noma_rate_bpcu", "oma_rate_bpcu"];
  for (const table of spec.inputs) {
    requireTable(table, SWEEP_SCHEMA, needed);
  }
  const xScale = altitudeScale(chart, spec.inputs);
  const yScale = linearScale(0, Math.max(spec.ceiling * 1.12, 1), chart.plotBottom, chart.plotTop);
  if (spec.band) drawBands(chart, xScale, spec.inputs[0]!);
  chart.gridY(yScale);
  spec.inputs.forEach((table, n) => {
    const h = column(table, "h_m");
    const suffix = spec.inputs.length > 1 ? ` [${shortLabel(table)}]` : "";
    const color = PALETTE[n % PALETTE.length]!;
    chart.series({ x: h, y: column(table, "noma_rate_bpcu"), color, label: `NOMA${suffix}` }, xScale, yScale);
    chart.series(
      { x: h, y: column(table, "oma_rate_bpcu"), color, label: `OMA${suffix}`, dash: "5,3" },
      xScale, yScale,
    );
  });
  chart.referenceLineY(yScale, spec.ceiling, `${spec.ceiling} BPCU ceiling`);
  chart.xAxis(xScale, "altitude (m)");
  chart.yAxis(yScale, "outage sum rate (BPCU)", "left");
  return chart.render();
}

export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "coverage":
      return renderCoverage(spec);
    case "outage":
      return renderOutage(spec);
    case "sumrate":
      return renderSumRate(spec);
  }
}
