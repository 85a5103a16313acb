/**
 * Minimal deterministic SVG chart builder: linear/log scales, axes with 1-2-5
 * ticks, polylines, reference lines, shaded vertical bands, and a legend.
 * No timestamps or randomness: identical inputs produce identical bytes.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export interface Scale {
  toPixel(value: number): number;
  ticks(): number[];
  domain: [number, number];
}

const fmt = (x: number): string => {
  const rounded = Math.round(x * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
};

export function niceTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const span = hi - lo;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / target)));
  let step = step0;
  for (const mult of [1, 2, 5, 10]) {
    step = step0 * mult;
    if (span / step <= target) break;
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

export function linearScale(lo: number, hi: number, pixelLo: number, pixelHi: number): Scale {
  const span = hi - lo || 1;
  return {
    domain: [lo, hi],
    toPixel: (v) => pixelLo + ((v - lo) / span) * (pixelHi - pixelLo),
    ticks: () => niceTicks(lo, hi),
  };
}

export function log10Scale(lo: number, hi: number, pixelLo: number, pixelHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return {
    domain: [lo, hi],
    toPixel: (v) => pixelLo + ((Math.log10(v) - llo) / span) * (pixelHi - pixelLo),
    ticks: () => ticks,
  };
}

const escapeXml = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label: string;
  dash?: string;
  /** y values at or below this are clipped out (log-scale floors) */
  clipBelow?: number;
}

export class Chart {
  readonly width: number;
  readonly height: number;
  readonly margin: Margin;
  private readonly parts: string[] = [];
  private readonly legendEntries: { color: string; label: string; dash?: string }[] = [];

  constructor(width = 760, height = 480, margin?: Partial<Margin>) {
    this.width = width;
    this.height = height;
    this.margin = { top: 46, right: 64, bottom: 56, left: 72, ...margin };
  }

  get plotLeft(): number {
    return this.margin.left;
  }

  get plotRight(): number {
    return this.width - this.margin.right;
  }

  get plotTop(): number {
    return this.margin.top;
  }

  get plotBottom(): number {
    return this.height - this.margin.bottom;
  }

  title(text: string): void {
    this.parts.push(
      `<text x="${this.width / 2}" y="24" text-anchor="middle" font-size="15" font-weight="bold">${escapeXml(text)}</text>`,
    );
  }

  /** Vertical shaded band between two x values (e.g. the scanning altitudes). */
  bandX(xScale: Scale, x0: number, x1: number, label?: string): void {
    const px0 = xScale.toPixel(x0);
    const px1 = xScale.toPixel(x1);
    this.parts.push(
      `<rect x="${fmt(px0)}" y="${this.plotTop}" width="${fmt(px1 - px0)}" height="${fmt(this.plotBottom - this.plotTop)}" fill="#f2b705" fill-opacity="0.15"/>`,
    );
    if (label) {
      this.parts.push(
        `<text x="${fmt((px0 + px1) / 2)}" y="${this.plotTop + 14}" text-anchor="middle" font-size="11" fill="#8a6d00">${escapeXml(label)}</text>`,
      );
    }
  }

  xAxis(scale: Scale, label: string): void {
    const y = this.plotBottom;
    this.parts.push(
      `<line x1="${this.plotLeft}" y1="${y}" x2="${this.plotRight}" y2="${y}" stroke="#222"/>`,
    );
    for (const tick of scale.ticks()) {
      const px = scale.toPixel(tick);
      this.parts.push(
        `<line x1="${fmt(px)}" y1="${y}" x2="${fmt(px)}" y2="${y + 5}" stroke="#222"/>`,
        `<text x="${fmt(px)}" y="${y + 19}" text-anchor="middle" font-size="11">${fmt(tick)}</text>`,
      );
    }
    this.parts.push(
      `<text x="${(this.plotLeft + this.plotRight) / 2}" y="${y + 40}" text-anchor="middle" font-size="13">${escapeXml(label)}</text>`,
    );
  }

  yAxis(scale: Scale, label: string, side: "left" | "right" = "left", log = false): void {
    const x = side === "left" ? this.plotLeft : this.plotRight;
    const tickEnd = side === "left" ? x - 5 : x + 5;
    const textX = side === "left" ? x - 8 : x + 8;
    const anchor = side === "left" ? "end" : "start";
    this.parts.push(
      `<line x1="${x}" y1="${this.plotTop}" x2="${x}" y2="${this.plotBottom}" stroke="#222"/>`,
    );
    for (const tick of scale.ticks()) {
      const py = scale.toPixel(tick);
      const text = log ? `1e${Math.round(Math.log10(tick))}` : fmt(tick);
      this.parts.push(
        `<line x1="${x}" y1="${fmt(py)}" x2="${tickEnd}" y2="${fmt(py)}" stroke="#222"/>`,
        `<text x="${textX}" y="${fmt(py + 4)}" text-anchor="${anchor}" font-size="11">${text}</text>`,
      );
    }
    const labelX = side === "left" ? 18 : this.width - 14;
    const mid = (this.plotTop + this.plotBottom) / 2;
    this.parts.push(
      `<text x="${labelX}" y="${mid}" text-anchor="middle" font-size="13" transform="rotate(-90 ${labelX} ${mid})">${escapeXml(label)}</text>`,
    );
  }

  gridY(scale: Scale): void {
    for (const tick of scale.ticks()) {
      const py = scale.toPixel(tick);
      this.parts.push(
        `<line x1="${this.plotLeft}" y1="${fmt(py)}" x2="${this.plotRight}" y2="${fmt(py)}" stroke="#ddd" stroke-dasharray="2,3"/>`,
      );
    }
  }

  series(s: Series, xScale: Scale, yScale: Scale): void {
    const runs: string[][] = [];
    let current: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const yv = s.y[i]!;
      if (s.clipBelow !== undefined && yv <= s.clipBelow) {
        if (current.length > 0) runs.push(current);
        current = [];
        continue;
      }
      current.push(`${fmt(xScale.toPixel(s.x[i]!))},${fmt(yScale.toPixel(yv))}`);
    }
    if (current.length > 0) runs.push(current);
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    for (const run of runs) {
      if (run.length === 1) {
        const [px, py] = run[0]!.split(",");
        this.parts.push(`<circle cx="${px}" cy="${py}" r="2" fill="${s.color}"/>`);
      } else {
        this.parts.push(
          `<polyline points="${run.join(" ")}" fill="none" stroke="${s.color}" stroke-width="1.8"${dash}/>`,
        );
      }
    }
    this.legendEntries.push({ color: s.color, label: s.label, dash: s.dash });
  }

  referenceLineY(yScale: Scale, value: number, label: string): void {
    const py = yScale.toPixel(value);
    this.parts.push(
      `<line x1="${this.plotLeft}" y1="${fmt(py)}" x2="${this.plotRight}" y2="${fmt(py)}" stroke="#555" stroke-dasharray="6,4"/>`,
      `<text x="${this.plotRight - 4}" y="${fmt(py - 5)}" text-anchor="end" font-size="11" fill="#555">${escapeXml(label)}</text>`,
    );
  }

  render(): string {
    const legendX = this.plotLeft + 10;
    let legendY = this.plotTop + 12;
    const legend: string[] = [];
    if (this.legendEntries.length > 0) {
      const height = this.legendEntries.length * 16 + 8;
      legend.push(
        `<rect x="${legendX - 6}" y="${legendY - 12}" width="190" height="${height}" fill="white" fill-opacity="0.85" stroke="#bbb"/>`,
      );
      for (const entry of this.legendEntries) {
        const dash = entry.dash ? ` stroke-dasharray="${entry.dash}"` : "";
        legend.push(
          `<line x1="${legendX}" y1="${legendY}" x2="${legendX + 22}" y2="${legendY}" stroke="${entry.color}" stroke-width="1.8"${dash}/>`,
          `<text x="${legendX + 28}" y="${legendY + 4}" font-size="11">${escapeXml(entry.label)}</text>`,
        );
        legendY += 16;
      }
    }
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${this.width}" height="${this.height}" fill="white"/>`,
      ...this.parts,
      ...legend,
      `</svg>`,
      ``,
    ].join("\n");
  }
}
