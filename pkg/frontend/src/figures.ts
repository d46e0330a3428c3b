/**
 * The four figure kinds. Everything here reads already-validated data,
 * transforms coordinates, and emits SVG; no statistics are recomputed.
 * Fitted and reference lines are anchored at the centroid of the plotted
 * points (slopes come from the fit file, never from a new regression).
 */
import { decadeTicks, linearScale, linearTicks, logScale, tickLabel, type Scale } from "./scale.js";
import * as svg from "./svg.js";
import type { CertificateDoc, Curve, FitDoc, SpectrumDoc } from "./schema.js";

export class EmptyDataError extends Error {}

export interface FigureOptions {
  width: number;
  height: number;
  window?: [number, number];
  title?: string;
}

const MARGIN = { left: 70, right: 18, top: 30, bottom: 46 };
const COLORS = {
  dirichlet: "#1f5fa8",
  neumann: "#c23b22",
  band: "#9ec3e0",
  fit: "#222222",
  reference: "#888888",
  certified: "#1a7f37",
};

interface Frame {
  x: Scale;
  y: Scale;
  body: string[];
}

function frame(
  options: FigureOptions,
  xDomain: [number, number],
  yDomain: [number, number],
  xLog: boolean,
  labels: { x: string; y: string; title: string },
): Frame {
  const { width, height } = options;
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;
  const x = xLog ? logScale(xDomain, [x0, x1]) : linearScale(xDomain, [x0, x1]);
  const y = linearScale(yDomain, [y0, y1]);
  const body: string[] = [];
  body.push(svg.el("rect", {
    x: x0, y: y1, width: x1 - x0, height: y0 - y1,
    fill: "none", stroke: "#333", "stroke-width": 1,
  }));
  const xTicks = xLog ? decadeTicks(xDomain[0], xDomain[1]) : linearTicks(xDomain[0], xDomain[1]);
  for (const tick of xTicks) {
    if (tick < xDomain[0] - 1e-12 || tick > xDomain[1] + 1e-12) continue;
    const px = x(tick);
    body.push(svg.el("line", { x1: px, y1: y0, x2: px, y2: y0 + 5, stroke: "#333" }));
    body.push(svg.text(tickLabel(tick), {
      x: px, y: y0 + 18, "font-size": 11, "text-anchor": "middle", fill: "#333",
    }));
  }
  for (const tick of linearTicks(yDomain[0], yDomain[1])) {
    if (tick < yDomain[0] - 1e-12 || tick > yDomain[1] + 1e-12) continue;
    const py = y(tick);
    body.push(svg.el("line", { x1: x0 - 5, y1: py, x2: x0, y2: py, stroke: "#333" }));
    body.push(svg.text(tickLabel(tick), {
      x: x0 - 8, y: py + 4, "font-size": 11, "text-anchor": "end", fill: "#333",
    }));
  }
  body.push(svg.text(labels.x, {
    x: (x0 + x1) / 2, y: height - 10, "font-size": 12, "text-anchor": "middle", fill: "#111",
  }));
  body.push(svg.text(labels.y, {
    x: 16, y: (y0 + y1) / 2, "font-size": 12, "text-anchor": "middle", fill: "#111",
    transform: `rotate(-90 16 ${svg.fmt((y0 + y1) / 2)})`,
  }));
  body.push(svg.text(options.title ?? labels.title, {
    x: (x0 + x1) / 2, y: 18, "font-size": 13, "text-anchor": "middle", fill: "#111",
  }));
  return { x, y, body };
}

function applyWindow(curve: Curve, window?: [number, number]): Curve {
  if (!window) return curve;
  const rows = curve.rows.filter((r) => r.E >= window[0] && r.E <= window[1]);
  if (rows.length === 0) {
    throw new EmptyDataError(`no curve points inside window [${window}]`);
  }
  return { ...curve, rows };
}

export function renderIds(curve: Curve, options: FigureOptions): string {
  const { rows } = applyWindow(curve, options.window);
  const eLo = rows[0].E;
  const eHi = rows[rows.length - 1].E;
  const yHi = Math.max(...rows.map((r) => r.n_neumann)) * 1.05 || 1;
  const f = frame(options, [eLo, eHi], [0, yHi], true, {
    x: "energy E",
    y: "eigenvalue count per volume",
    title: `normalized counting functions (d=${curve.d}, L=${curve.L})`,
  });
  const lower = rows.map((r) => [f.x(r.E), f.y(r.n_dirichlet)] as [number, number]);
  const upper = rows.map((r) => [f.x(r.E), f.y(r.n_neumann)] as [number, number]);
  f.body.push(svg.el("polygon", {
    points: svg.polylinePoints([...lower, ...[...upper].reverse()]),
    fill: COLORS.band, "fill-opacity": 0.45, stroke: "none",
  }));
  f.body.push(svg.el("polyline", {
    points: svg.polylinePoints(lower),
    fill: "none", stroke: COLORS.dirichlet, "stroke-width": 1.5,
  }));
  f.body.push(svg.el("polyline", {
    points: svg.polylinePoints(upper),
    fill: "none", stroke: COLORS.neumann, "stroke-width": 1.5,
  }));
  f.body.push(svg.text("dirichlet", {
    x: MARGIN.left + 8, y: MARGIN.top + 14, "font-size": 11, fill: COLORS.dirichlet,
  }));
  f.body.push(svg.text("neumann", {
    x: MARGIN.left + 8, y: MARGIN.top + 28, "font-size": 11, fill: COLORS.neumann,
  }));
  return svg.document(options.width, options.height, f.body);
}

interface LogPoint {
  logE: number;
  value: number;
}

function slopeLine(
  f: Frame,
  points: LogPoint[],
  slope: number,
  color: string,
  dashed: boolean,
  label: string,
  labelOffset: number,
  toY: (v: number) => number,
): void {
  const cx = points.reduce((a, p) => a + p.logE, 0) / points.length;
  const cy = points.reduce((a, p) => a + p.value, 0) / points.length;
  const x0 = points[0].logE;
  const x1 = points[points.length - 1].logE;
  const line = (lx: number) => cy + slope * (lx - cx);
  const attrs: svg.Attrs = {
    x1: f.x(10 ** x0), y1: toY(line(x0)),
    x2: f.x(10 ** x1), y2: toY(line(x1)),
    stroke: color, "stroke-width": 1.4,
  };
  if (dashed) attrs["stroke-dasharray"] = "6 4";
  f.body.push(svg.el("line", attrs));
  f.body.push(svg.text(label, {
    x: MARGIN.left + 8, y: MARGIN.top + labelOffset, "font-size": 11, fill: color,
  }));
}

function transformedFigure(
  curve: Curve,
  fit: FitDoc,
  options: FigureOptions,
  transform: (n: number) => number | null,
  yLabel: string,
  title: string,
  referenceSlope: number,
  referenceLabel: string,
): string {
  const window = options.window ?? fit.window;
  const { rows } = applyWindow(curve, window);
  const side = fit.side === "dirichlet" ? "n_dirichlet" : "n_neumann";
  const points: LogPoint[] = [];
  for (const row of rows) {
    const value = transform(row[side]);
    if (value !== null) points.push({ logE: Math.log10(row.E), value });
  }
  if (points.length === 0) {
    throw new EmptyDataError("empty usable data after log-exclusions");
  }
  const values = points.map((p) => p.value);
  const yDomain: [number, number] = [Math.min(...values) - 0.1, Math.max(...values) + 0.1];
  const f = frame(options, [10 ** points[0].logE, 10 ** points[points.length - 1].logE],
    yDomain, true, { x: "energy E", y: yLabel, title });
  const toY = (v: number) => f.y(v);
  for (const p of points) {
    f.body.push(svg.el("circle", {
      cx: f.x(10 ** p.logE), cy: toY(p.value), r: 2.6,
      fill: fit.side === "dirichlet" ? COLORS.dirichlet : COLORS.neumann,
    }));
  }
  slopeLine(f, points, fit.exponent, COLORS.fit, false,
    `fit slope ${fit.exponent.toFixed(3)}`, 14, toY);
  slopeLine(f, points, referenceSlope, COLORS.reference, true,
    referenceLabel, 28, toY);
  return svg.document(options.width, options.height, f.body);
}

export function renderLifshitz(curve: Curve, fit: FitDoc, options: FigureOptions): string {
  const reference = -curve.d / 2;
  return transformedFigure(
    curve, fit, options,
    (n) => (n > 0 && n < 1 ? Math.log10(-Math.log(n)) : null),
    "log|log N|",
    `spectral-edge decay, ${fit.side} side (d=${curve.d})`,
    reference,
    `reference slope -d/2 = ${reference.toFixed(1)}`,
  );
}

export function renderVanhove(curve: Curve, fit: FitDoc, options: FigureOptions): string {
  const reference = curve.d / 2;
  return transformedFigure(
    curve, fit, options,
    (n) => (n > 0 ? Math.log10(n) : null),
    "log N",
    `spectral-edge growth, ${fit.side} side (d=${curve.d})`,
    reference,
    `reference slope d/2 = ${reference.toFixed(1)}`,
  );
}

export function renderCertificate(
  spectrum: SpectrumDoc,
  certificates: CertificateDoc[],
  options: FigureOptions,
): string {
  const counts = (spectrum.counts ?? []).slice().sort((a, b) => a.E - b.E);
  if (counts.length === 0) {
    throw new EmptyDataError("spectrum file has no counting data");
  }
  if (certificates.length === 0) {
    throw new EmptyDataError("no certificates supplied");
  }
  const certPoints = certificates.map((c) => ({
    E: c.certified_energy,
    count: c.certified_count,
  }));
  const eLo = Math.min(counts[0].E, ...certPoints.map((p) => p.E));
  const eHi = Math.max(counts[counts.length - 1].E, ...certPoints.map((p) => p.E));
  const yHi = Math.max(counts[counts.length - 1].count, ...certPoints.map((p) => p.count));
  const f = frame(options, [eLo, eHi], [0, yHi * 1.08 || 1], true, {
    x: "energy E",
    y: "eigenvalue count",
    title: `certified lower bounds vs empirical counts (${spectrum.bc}, L=${spectrum.L})`,
  });
  const steps: Array<[number, number]> = [];
  counts.forEach((point, i) => {
    if (i > 0) steps.push([f.x(point.E), f.y(counts[i - 1].count)]);
    steps.push([f.x(point.E), f.y(point.count)]);
  });
  f.body.push(svg.el("polyline", {
    points: svg.polylinePoints(steps),
    fill: "none", stroke: COLORS.neumann, "stroke-width": 1.5,
  }));
  for (const point of certPoints) {
    f.body.push(svg.el("circle", {
      cx: f.x(point.E), cy: f.y(point.count), r: 4,
      fill: COLORS.certified, stroke: "#0b4f1f", "stroke-width": 1,
      class: "certified-point",
    }));
  }
  f.body.push(svg.text("empirical counting curve", {
    x: MARGIN.left + 8, y: MARGIN.top + 14, "font-size": 11, fill: COLORS.neumann,
  }));
  f.body.push(svg.text("certified (energy, count)", {
    x: MARGIN.left + 8, y: MARGIN.top + 28, "font-size": 11, fill: COLORS.certified,
  }));
  return svg.document(options.width, options.height, f.body);
}
