/**
 * Minimal deterministic SVG scene builder: fixed canvas, numeric formatting
 * with stable precision, no timestamps or random ids anywhere.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 160, bottom: 56, left: 72 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

const fmt = (x: number): string => {
  if (!Number.isFinite(x)) return "0";
  return Number(x.toFixed(2)).toString();
};

export class Scene {
  private parts: string[] = [];

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#333", width = 1) {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, fill: string) {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`,
    );
  }

  circle(cx: number, cy: number, r: number, fill: string) {
    this.parts.push(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  polyline(points: [number, number][], stroke: string, width = 2) {
    const joined = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${joined}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  text(x: number, y: number, content: string, opts: {
    size?: number; anchor?: string; rotate?: boolean; fill?: string;
  } = {}) {
    const size = opts.size ?? 12;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#111";
    const transform = opts.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" ` +
        `font-family="sans-serif" fill="${fill}"${transform}>${escapeXml(content)}</text>`,
    );
  }

  render(title: string): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
        `viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="24" font-size="16" text-anchor="middle" ` +
        `font-family="sans-serif">${escapeXml(title)}</text>`,
      ...this.parts,
      "</svg>",
    ].join("\n");
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Scale {
  (value: number): number;
  min: number;
  max: number;
}

export function linearScale(
  min: number,
  max: number,
  outMin: number,
  outMax: number,
): Scale {
  const span = max - min || 1;
  const scale = ((value: number) =>
    outMin + ((value - min) / span) * (outMax - outMin)) as Scale;
  scale.min = min;
  scale.max = max;
  return scale;
}

/** Integer-valued ticks covering [min, max] (at most ~8). */
export function ticks(min: number, max: number): number[] {
  const span = max - min || 1;
  const step = Math.max(1, Math.ceil(span / 8));
  const first = Math.ceil(min);
  const out: number[] = [];
  for (let v = first; v <= max + 1e-9; v += step) out.push(v);
  if (out.length === 0) out.push(Math.round(min));
  return out;
}

export function drawFrame(
  scene: Scene,
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
) {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  scene.line(x0, y0, x1, y0);
  scene.line(x0, y0, x0, y1);
  for (const t of ticks(xScale.min, xScale.max)) {
    const px = xScale(t);
    scene.line(px, y0, px, y0 + 5);
    scene.text(px, y0 + 20, String(t), { anchor: "middle" });
  }
  for (const t of ticks(yScale.min, yScale.max)) {
    const py = yScale(t);
    scene.line(x0 - 5, py, x0, py);
    scene.text(x0 - 9, py + 4, String(t), { anchor: "end" });
  }
  scene.text((x0 + x1) / 2, HEIGHT - 14, xLabel, { anchor: "middle" });
  scene.text(20, (y0 + y1) / 2, yLabel, { anchor: "middle", rotate: true });
}

export function drawLegend(scene: Scene, labels: string[]) {
  const x = WIDTH - MARGIN.right + 16;
  labels.forEach((label, i) => {
    const y = MARGIN.top + 18 * i;
    scene.rect(x, y - 9, 12, 12, PALETTE[i % PALETTE.length]);
    scene.text(x + 18, y + 1, label);
  });
}

export function noData(scene: Scene, label: string) {
  scene.text(WIDTH / 2, HEIGHT / 2, `no data: ${label}`, {
    anchor: "middle",
    size: 14,
    fill: "#888",
  });
}

export const log10 = (value: number): number =>
  Math.log10(Math.max(value, Number.MIN_VALUE));
