/** Hand-rolled SVG chart primitives — deterministic output, no timestamps. */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { top: 40, right: 24, bottom: 52, left: 68 };

export type Scale = (v: number) => number;

export function linScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

/** Round tick positions covering [lo, hi] with a 1/2/5 step. */
export function linTicks(lo: number, hi: number, target = 6): number[] {
  const span = hi - lo || 1;
  const step0 = span / target;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= target) ?? mag * 10;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

/** Decade ticks for a log axis. */
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.log10(hi) + 1e-9; e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

export function fmtTick(v: number): string {
  if (v !== 0 && (Math.abs(v) < 1e-3 || Math.abs(v) >= 1e5)) {
    return v.toExponential(0).replace("e-", "e-").replace("e+", "e");
  }
  return Number(v.toFixed(6)).toString();
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export interface Frame {
  x: Scale;
  y: Scale;
  body: string[];
}

export interface FrameOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  xDomain: [number, number];
  yDomain: [number, number];
  yLog?: boolean;
}

/** Axes, grid lines, ticks, and labels; returns the scales for the plot area. */
export function makeFrame(o: FrameOpts): Frame {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const x = linScale(o.xDomain[0], o.xDomain[1], x0, x1);
  const y = o.yLog
    ? logScale(o.yDomain[0], o.yDomain[1], y0, y1)
    : linScale(o.yDomain[0], o.yDomain[1], y0, y1);

  const body: string[] = [];
  body.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333"/>`);
  body.push(`<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15" font-weight="bold">${esc(o.title)}</text>`);
  body.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="12">${esc(o.xLabel)}</text>`);
  body.push(`<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 16 ${(y0 + y1) / 2})">${esc(o.yLabel)}</text>`);

  for (const t of linTicks(o.xDomain[0], o.xDomain[1])) {
    const px = x(t);
    if (px < x0 - 0.5 || px > x1 + 0.5) continue;
    body.push(`<line x1="${px.toFixed(2)}" y1="${y1}" x2="${px.toFixed(2)}" y2="${y0}" stroke="#ddd"/>`);
    body.push(`<text x="${px.toFixed(2)}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmtTick(t)}</text>`);
  }
  const yTicks = o.yLog ? logTicks(o.yDomain[0], o.yDomain[1]) : linTicks(o.yDomain[0], o.yDomain[1]);
  for (const t of yTicks) {
    const py = y(t);
    if (py < y1 - 0.5 || py > y0 + 0.5) continue;
    body.push(`<line x1="${x0}" y1="${py.toFixed(2)}" x2="${x1}" y2="${py.toFixed(2)}" stroke="#ddd"/>`);
    body.push(`<text x="${x0 - 6}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="11">${fmtTick(t)}</text>`);
  }
  return { x, y, body };
}

export function polyline(pts: [number, number][], color: string, dash = ""): string {
  const d = pts.map((p) => `${p[0].toFixed(2)},${p[1].toFixed(2)}`).join(" ");
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<polyline points="${d}" fill="none" stroke="${color}" stroke-width="1.6"${dashAttr}/>`;
}

/** Step-after path for CCDF stair plots. */
export function stairs(pts: [number, number][], color: string, dash = ""): string {
  if (pts.length === 0) return "";
  const parts = [`M ${pts[0][0].toFixed(2)} ${pts[0][1].toFixed(2)}`];
  for (let i = 1; i < pts.length; i++) {
    parts.push(`H ${pts[i][0].toFixed(2)} V ${pts[i][1].toFixed(2)}`);
  }
  const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
  return `<path d="${parts.join(" ")}" fill="none" stroke="${color}" stroke-width="1.6"${dashAttr}/>`;
}

export function circles(pts: [number, number][], color: string, r = 2.2): string {
  return pts
    .map((p) => `<circle cx="${p[0].toFixed(2)}" cy="${p[1].toFixed(2)}" r="${r}" fill="${color}" fill-opacity="0.6"/>`)
    .join("\n");
}

export function legend(entries: { label: string; color: string; dash?: string }[]): string {
  const x = MARGIN.left + 12;
  let y = MARGIN.top + 14;
  const out: string[] = [];
  for (const e of entries) {
    const dashAttr = e.dash ? ` stroke-dasharray="${e.dash}"` : "";
    out.push(`<line x1="${x}" y1="${y - 4}" x2="${x + 26}" y2="${y - 4}" stroke="${e.color}" stroke-width="2"${dashAttr}/>`);
    out.push(`<text x="${x + 32}" y="${y}" font-size="11">${esc(e.label)}</text>`);
    y += 16;
  }
  return out.join("\n");
}

export function document(body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    ...body,
    `</svg>`,
    ``,
  ].join("\n");
}
