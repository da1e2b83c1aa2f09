/**
 * The four figure kinds rendered from the solver benchmark CSVs:
 *
 *   subopt_bars       grouped log10 sup-suboptimality bars per method
 *                     (method comparison summaries)
 *   runtime_vs_subopt log-log tradeoff curves of wall time vs accuracy
 *   risk_curves       KL risk along the path, log10 risk axis
 *   order_plot        log10 step counts against log10(1/epsilon) with the
 *                     fitted slope per method
 */

import { readAll } from "./csv.js";
import {
  HEIGHT, MARGIN, PALETTE, Scale, Scene, WIDTH,
  drawFrame, drawLegend, linearScale, log10, noData,
} from "./svg.js";

const plotX = (): [number, number] => [MARGIN.left, WIDTH - MARGIN.right];
const plotY = (): [number, number] => [HEIGHT - MARGIN.bottom, MARGIN.top];

function groupBy<T>(rows: T[], key: (row: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const row of rows) {
    const k = key(row);
    const bucket = out.get(k);
    if (bucket) bucket.push(row);
    else out.set(k, [row]);
  }
  return out;
}

function span(values: number[], pad = 0.5): [number, number] {
  if (values.length === 0) return [-1, 1];
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  return [lo - pad, hi + pad];
}

export function suboptBars(inputs: string[]): string {
  const rows = readAll(inputs, ["method", "sup_subopt", "seed"]);
  const scene = new Scene();
  const groups = groupBy(rows.filter((r) => Number(r.sup_subopt) > 0),
                         (r) => r.method);
  if (groups.size === 0) {
    noData(scene, "no rows with positive sup_subopt");
    return scene.render("sup-suboptimality by method");
  }
  const methods = [...groups.keys()];
  const values = rows.map((r) => log10(Number(r.sup_subopt)));
  const [lo, hi] = span(values);
  const [py0, py1] = plotY();
  const y = linearScale(lo, hi, py0, py1);
  const [px0, px1] = plotX();
  const x = linearScale(0, methods.length, px0, px1);
  drawFrame(scene, x, y, "method", "log10(sup-suboptimality)");

  methods.forEach((method, m) => {
    const bucket = groups.get(method)!;
    const slot = x(m + 1) - x(m);
    const barWidth = Math.min(18, (slot * 0.8) / bucket.length);
    bucket.forEach((row, i) => {
      const value = log10(Number(row.sup_subopt));
      const left = x(m) + slot * 0.1 + i * barWidth;
      scene.rect(left, y(value), barWidth * 0.9, py0 - y(value),
                 PALETTE[m % PALETTE.length]);
    });
    scene.text(x(m) + slot / 2, py0 + 36, method, { anchor: "middle" });
  });
  drawLegend(scene, methods);
  return scene.render("sup-suboptimality by method");
}

export function runtimeVsSubopt(inputs: string[]): string {
  const rows = readAll(inputs, ["method", "wall_time_s", "sup_subopt"]);
  const scene = new Scene();
  const usable = rows.filter(
    (r) => Number(r.wall_time_s) > 0 && Number(r.sup_subopt) > 0,
  );
  if (usable.length === 0) {
    noData(scene, "no rows with positive runtime and sup_subopt");
    return scene.render("runtime vs sup-suboptimality");
  }
  const xs = usable.map((r) => log10(Number(r.wall_time_s)));
  const ys = usable.map((r) => log10(Number(r.sup_subopt)));
  const [py0, py1] = plotY();
  const [px0, px1] = plotX();
  const x = linearScale(...span(xs), px0, px1);
  const y = linearScale(...span(ys), py0, py1);
  drawFrame(scene, x, y, "log10(wall time [s])", "log10(sup-suboptimality)");
  const groups = groupBy(usable, (r) => r.method);
  [...groups.keys()].forEach((method, m) => {
    const pts = groups.get(method)!
      .map((r) => [log10(Number(r.wall_time_s)),
                   log10(Number(r.sup_subopt))] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    const color = PALETTE[m % PALETTE.length];
    scene.polyline(pts.map(([a, b]) => [x(a), y(b)]), color);
    for (const [a, b] of pts) scene.circle(x(a), y(b), 3, color);
  });
  drawLegend(scene, [...groups.keys()]);
  return scene.render("runtime vs sup-suboptimality");
}

export function riskCurves(inputs: string[]): string {
  const rows = readAll(inputs, ["method", "alpha1", "t", "risk"]);
  const scene = new Scene();
  const usable = rows.filter((r) => Number(r.risk) > 0);
  if (usable.length === 0) {
    noData(scene, "no rows with positive risk");
    return scene.render("KL risk along the path");
  }
  const [py0, py1] = plotY();
  const [px0, px1] = plotX();
  const ts = usable.map((r) => Number(r.t));
  const risks = usable.map((r) => log10(Number(r.risk)));
  const x = linearScale(Math.min(...ts), Math.max(...ts), px0, px1);
  const y = linearScale(...span(risks, 0.3), py0, py1);
  drawFrame(scene, x, y, "t", "log10(KL risk)");
  const label = (r: Record<string, string>) =>
    r.alpha1 === "nan" ? r.method : `${r.method} (a1=${Number(r.alpha1).toPrecision(2)})`;
  const groups = groupBy(usable, label);
  [...groups.keys()].forEach((name, m) => {
    const pts = groups.get(name)!
      .map((r) => [Number(r.t), log10(Number(r.risk))] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    scene.polyline(pts.map(([a, b]) => [x(a), y(b)]),
                   PALETTE[m % PALETTE.length]);
  });
  drawLegend(scene, [...groups.keys()]);
  return scene.render("KL risk along the path");
}

function fitSlope(xs: number[], ys: number[]): number {
  const n = xs.length;
  const mx = xs.reduce((a, b) => a + b, 0) / n;
  const my = ys.reduce((a, b) => a + b, 0) / n;
  let num = 0;
  let den = 0;
  for (let i = 0; i < n; i++) {
    num += (xs[i] - mx) * (ys[i] - my);
    den += (xs[i] - mx) ** 2;
  }
  return den === 0 ? 0 : num / den;
}

export function orderPlot(inputs: string[]): string {
  const rows = readAll(inputs, ["method", "epsilon", "steps"]);
  const scene = new Scene();
  const usable = rows.filter(
    (r) => Number(r.epsilon) > 0 && Number(r.steps) > 0,
  );
  if (usable.length === 0) {
    noData(scene, "no rows with positive epsilon and steps");
    return scene.render("steps vs target suboptimality");
  }
  const xs = usable.map((r) => log10(1 / Number(r.epsilon)));
  const ys = usable.map((r) => log10(Number(r.steps)));
  const [py0, py1] = plotY();
  const [px0, px1] = plotX();
  const x = linearScale(...span(xs, 0.3), px0, px1);
  const y = linearScale(...span(ys, 0.3), py0, py1);
  drawFrame(scene, x, y, "log10(1/epsilon)", "log10(steps)");
  const groups = groupBy(usable, (r) => r.method);
  const labels: string[] = [];
  [...groups.keys()].forEach((method, m) => {
    const bucket = groups.get(method)!;
    const gx = bucket.map((r) => log10(1 / Number(r.epsilon)));
    const gy = bucket.map((r) => log10(Number(r.steps)));
    const slope = fitSlope(gx, gy);
    const color = PALETTE[m % PALETTE.length];
    const pts = gx.map((a, i) => [a, gy[i]] as [number, number])
      .sort((a, b) => a[0] - b[0]);
    scene.polyline(pts.map(([a, b]) => [x(a), y(b)]), color);
    for (const [a, b] of pts) scene.circle(x(a), y(b), 3, color);
    labels.push(`${method} (slope ${slope.toFixed(2)})`);
  });
  drawLegend(scene, labels);
  return scene.render("steps vs target suboptimality");
}

export const CHARTS: Record<string, (inputs: string[]) => string> = {
  subopt_bars: suboptBars,
  runtime_vs_subopt: runtimeVsSubopt,
  risk_curves: riskCurves,
  order_plot: orderPlot,
};
