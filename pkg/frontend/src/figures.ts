/** Figure extraction and rendering for the two appendix-style plots.
 *
 * bound_vs_epsilon: one curve per distinct n, probability bound against
 * epsilon on a fixed [0, 1] probability axis. growth_vs_n: the single
 * growth-rate curve against n. Both render to deterministic standalone SVG.
 */

import { DataError, numeric, parseCsv, requireColumns, type Row } from "./csv.js";
import { linearScale, ticks, type Scale } from "./scale.js";
import * as svg from "./svg.js";

export type FigureKind = "bound_vs_epsilon" | "growth_vs_n";

export const FIGURE_KINDS: FigureKind[] = ["bound_vs_epsilon", "growth_vs_n"];

export interface FigureSpec {
  kind: FigureKind;
  inputCsv: string;
  outputImage: string;
}

export interface Point {
  x: number;
  y: number;
}

export interface Curve {
  label: string;
  points: Point[];
}

const WIDTH = 800;
const HEIGHT = 500;
const MARGIN = { left: 72, right: 150, top: 36, bottom: 58 };

const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const REQUIRED: Record<FigureKind, string[]> = {
  bound_vs_epsilon: ["n", "epsilon", "bound_poly"],
  growth_vs_n: ["n", "growth_bound"],
};

const AXIS_LABELS: Record<FigureKind, { x: string; y: string }> = {
  bound_vs_epsilon: { x: "ε", y: "probability bound" },
  growth_vs_n: { x: "n", y: "growth bound" },
};

function clampUnit(v: number): number {
  return Math.min(1, Math.max(0, v));
}

export function extractCurves(kind: FigureKind, rows: Row[]): Curve[] {
  requireColumns(rows, REQUIRED[kind]);
  if (kind === "growth_vs_n") {
    const points = rows
      .map((r) => ({ x: numeric(r, "n"), y: numeric(r, "growth_bound") }))
      .sort((a, b) => a.x - b.x);
    return [{ label: "growth bound", points }];
  }
  const byN = new Map<number, Point[]>();
  for (const row of rows) {
    const n = numeric(row, "n");
    const point = { x: numeric(row, "epsilon"), y: clampUnit(numeric(row, "bound_poly")) };
    const bucket = byN.get(n);
    if (bucket) bucket.push(point);
    else byN.set(n, [point]);
  }
  return [...byN.keys()]
    .sort((a, b) => a - b)
    .map((n) => ({
      label: `n = ${n}`,
      points: byN.get(n)!.sort((a, b) => a.x - b.x),
    }));
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

function axes(x: Scale, y: Scale, labels: { x: string; y: string }): string[] {
  const [left, right] = x.range;
  const [bottom, top] = y.range;
  const parts: string[] = [];
  for (const t of ticks(y.domain[0], y.domain[1])) {
    const yy = y(t);
    parts.push(svg.line(left, yy, right, yy, { stroke: "#e0e0e0" }));
    parts.push(svg.line(left - 5, yy, left, yy, { stroke: "#1a1a1a" }));
    parts.push(svg.text(left - 9, yy + 4, String(t), { anchor: "end", size: 11 }));
  }
  for (const t of ticks(x.domain[0], x.domain[1])) {
    const xx = x(t);
    parts.push(svg.line(xx, bottom, xx, bottom + 5, { stroke: "#1a1a1a" }));
    parts.push(svg.text(xx, bottom + 19, String(t), { anchor: "middle", size: 11 }));
  }
  parts.push(svg.line(left, top, left, bottom, { stroke: "#1a1a1a" }));
  parts.push(svg.line(left, bottom, right, bottom, { stroke: "#1a1a1a" }));
  parts.push(
    svg.text((left + right) / 2, bottom + 42, labels.x, { anchor: "middle", size: 14 })
  );
  const yMid = (top + bottom) / 2;
  parts.push(
    svg.text(left - 52, yMid, labels.y, {
      anchor: "middle",
      size: 14,
      rotate: { angle: -90, cx: left - 52, cy: yMid },
    })
  );
  return parts;
}

function legend(curves: Curve[], xRight: number, yTop: number): string[] {
  const parts: string[] = [];
  curves.forEach((curve, i) => {
    const y = yTop + 22 * i;
    const color = PALETTE[i % PALETTE.length]!;
    parts.push(svg.line(xRight + 12, y, xRight + 40, y, { stroke: color, width: 2 }));
    parts.push(svg.text(xRight + 46, y + 4, curve.label, { size: 12 }));
  });
  return parts;
}

export function renderFigure(kind: FigureKind, csvText: string): string {
  const curves = extractCurves(kind, parseCsv(csvText));
  const allX = curves.flatMap((c) => c.points.map((p) => p.x));
  const allY = curves.flatMap((c) => c.points.map((p) => p.y));
  if (allX.length === 0) throw new DataError("no plottable points");

  const [xLo, xHi] = extent(allX);
  // probability axis is pinned to [0, 1]; the growth axis starts at 0
  const yDomain: [number, number] =
    kind === "bound_vs_epsilon" ? [0, 1] : [0, Math.max(1, extent(allY)[1])];

  const x = linearScale([xLo, xHi === xLo ? xLo + 1 : xHi], [MARGIN.left, WIDTH - MARGIN.right]);
  const y = linearScale(yDomain, [HEIGHT - MARGIN.bottom, MARGIN.top]);

  const body = axes(x, y, AXIS_LABELS[kind]);
  curves.forEach((curve, i) => {
    const path = svg.polylinePath(curve.points.map((p) => [x(p.x), y(p.y)]));
    const color = PALETTE[i % PALETTE.length]!;
    body.push(
      `<path class="curve" data-label="${svg.escapeText(curve.label)}" d="${path}"` +
        ` fill="none" stroke="${color}" stroke-width="2"/>`
    );
  });
  if (curves.length > 1) {
    body.push(...legend(curves, WIDTH - MARGIN.right, MARGIN.top + 12));
  }
  return svg.document(WIDTH, HEIGHT, body);
}
