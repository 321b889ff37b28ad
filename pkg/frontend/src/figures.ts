import { writeFileSync } from "fs";
import path from "path";

import { column, loadCsv } from "./csv.js";
import type { FigureSpec } from "./spec.js";
import * as svg from "./svg.js";

const resolve = (baseDir: string, p: string) =>
  path.isAbsolute(p) ? p : path.join(baseDir, p);

function extent(vals: number[]): [number, number] {
  const v = vals.filter((x) => Number.isFinite(x));
  if (v.length === 0) throw new Error("no finite data points");
  return [Math.min(...v), Math.max(...v)];
}

const dbm = (mw: number) => 10 * Math.log10(mw);

// -- figure builders --------------------------------------------------------

function scatterFigure(spec: Extract<FigureSpec, { kind: "scatter" }>, baseDir: string): string {
  const t = loadCsv(resolve(baseDir, spec.input), ["re", "im", "evm_max_db"]);
  if (t.rows.length === 0) throw new Error(`${spec.input}: no data rows`);
  const re = column(t, "re");
  const im = column(t, "im");
  const lim = Math.max(...re.map(Math.abs), ...im.map(Math.abs)) * 1.1;
  const frame = svg.makeFrame({
    title: spec.title ?? `Optimized offset symbols (EVM_max ${t.rows[0]["evm_max_db"]} dB)`,
    xLabel: "In-phase",
    yLabel: "Quadrature",
    xDomain: [-lim, lim],
    yDomain: [-lim, lim],
  });
  const pts: [number, number][] = re.map((r, i) => [frame.x(r), frame.y(im[i])]);
  return svg.document([...frame.body, svg.circles(pts, svg.PALETTE[0])]);
}

function ccdfFigure(spec: Extract<FigureSpec, { kind: "rcm_ccdf" }>, baseDir: string): string {
  const t = loadCsv(resolve(baseDir, spec.input), ["threshold", "prob_unshaped", "prob_shaped"]);
  if (t.rows.length === 0) throw new Error(`${spec.input}: no data rows`);
  const thr = column(t, "threshold");
  const curves = [
    { label: "unshaped", vals: column(t, "prob_unshaped"), dash: "" },
    { label: "shaped", vals: column(t, "prob_shaped"), dash: "6 3" },
  ];
  const positive = curves.flatMap((c) => c.vals.filter((p) => p > 0));
  if (positive.length === 0) throw new Error(`${spec.input}: all CCDF values are zero`);
  const yMin = Math.max(Math.min(...positive), 1e-6);
  const frame = svg.makeFrame({
    title: spec.title ?? "RCM CCDF",
    xLabel: "RCM threshold",
    yLabel: "Pr(RCM > threshold)",
    xDomain: extent(thr),
    yDomain: [yMin, 1],
    yLog: true,
  });
  const body = [...frame.body];
  const entries: { label: string; color: string; dash?: string }[] = [];
  curves.forEach((c, i) => {
    const pts: [number, number][] = [];
    c.vals.forEach((p, k) => {
      if (Number.isFinite(p) && p > 0) pts.push([frame.x(thr[k]), frame.y(p)]);
    });
    if (pts.length === 0) return; // e.g. shaping disabled: column all nan
    body.push(svg.stairs(pts, svg.PALETTE[i], c.dash));
    entries.push({ label: c.label, color: svg.PALETTE[i], dash: c.dash });
  });
  body.push(svg.legend(entries));
  return svg.document(body);
}

function psdFigure(spec: Extract<FigureSpec, { kind: "psd" }>, baseDir: string): string {
  const t = loadCsv(resolve(baseDir, spec.input), ["freq_hz", "psd_pre_mw", "psd_post_mw"]);
  if (t.rows.length === 0) throw new Error(`${spec.input}: no data rows`);
  const freqKhz = column(t, "freq_hz").map((f) => f / 1000);
  const pre = column(t, "psd_pre_mw").map(dbm);
  const post = column(t, "psd_post_mw").map(dbm);
  const [yLoRaw, yHi] = extent([...pre, ...post]);
  const yLo = Math.max(yLoRaw, yHi - 100);
  const frame = svg.makeFrame({
    title: spec.title ?? "Averaged PSD",
    xLabel: "Frequency offset (kHz)",
    yLabel: "PSD (dBm)",
    xDomain: extent(freqKhz),
    yDomain: [yLo, yHi + 5],
  });
  const body = [...frame.body];
  const line = (vals: number[], color: string, dash = "") =>
    svg.polyline(
      freqKhz.map((f, i) => [frame.x(f), frame.y(Math.max(vals[i], yLo))] as [number, number]),
      color,
      dash
    );
  body.push(line(pre, svg.PALETTE[0]));
  body.push(line(post, svg.PALETTE[1], "6 3"));
  const entries = [
    { label: "pre-PA", color: svg.PALETTE[0] },
    { label: "post-PA", color: svg.PALETTE[1], dash: "6 3" },
  ];
  if (spec.mask) {
    const edge = spec.mask.bw_hz / 2000;
    const yMask = frame.y(spec.mask.limit_dbm);
    for (const [a, b] of [
      [Math.min(...freqKhz), -edge],
      [edge, Math.max(...freqKhz)],
    ]) {
      body.push(
        svg.polyline(
          [
            [frame.x(a), yMask],
            [frame.x(b), yMask],
          ],
          "#333",
          "2 3"
        )
      );
    }
    entries.push({ label: `SEM mask (${spec.mask.limit_dbm} dBm)`, color: "#333", dash: "2 3" });
  }
  body.push(svg.legend(entries));
  return svg.document(body);
}

function berFigure(spec: Extract<FigureSpec, { kind: "ber" }>, baseDir: string): string {
  const curves = spec.inputs.map((s) => {
    const t = loadCsv(resolve(baseDir, s.csv), ["ebn0_db", "ber"]);
    if (t.rows.length === 0) throw new Error(`${s.csv}: no data rows`);
    return { label: s.label, ebn0: column(t, "ebn0_db"), ber: column(t, "ber") };
  });
  const allBer = curves.flatMap((c) => c.ber.filter((b) => b > 0));
  if (allBer.length === 0) throw new Error("all BER values are zero; nothing to plot on a log axis");
  const yMin = Math.min(...allBer);
  const frame = svg.makeFrame({
    title: spec.title ?? "Uncoded BER",
    xLabel: "Eb/N0 (dB)",
    yLabel: "BER",
    xDomain: extent(curves.flatMap((c) => c.ebn0)),
    yDomain: [yMin, 1],
    yLog: true,
  });
  const body = [...frame.body];
  curves.forEach((c, i) => {
    const pts: [number, number][] = [];
    c.ber.forEach((b, k) => {
      if (b > 0) pts.push([frame.x(c.ebn0[k]), frame.y(b)]);
    });
    body.push(svg.polyline(pts, svg.PALETTE[i % svg.PALETTE.length]));
    body.push(svg.circles(pts, svg.PALETTE[i % svg.PALETTE.length], 2.8));
  });
  body.push(
    svg.legend(curves.map((c, i) => ({ label: c.label, color: svg.PALETTE[i % svg.PALETTE.length] })))
  );
  return svg.document(body);
}

function seFigure(spec: Extract<FigureSpec, { kind: "se" }>, baseDir: string): string {
  const bars = spec.inputs.map((s) => {
    const t = loadCsv(resolve(baseDir, s.csv), ["ebn0_db", "se_bit_s_hz"]);
    if (t.rows.length === 0) throw new Error(`${s.csv}: no data rows`);
    const ebn0 = column(t, "ebn0_db");
    const se = column(t, "se_bit_s_hz");
    let idx = ebn0.length - 1;
    if (spec.ebn0_db !== undefined) {
      idx = ebn0.findIndex((e) => Math.abs(e - spec.ebn0_db!) < 1e-9);
      if (idx < 0) throw new Error(`${s.csv}: no row with ebn0_db = ${spec.ebn0_db}`);
    }
    return { label: s.label, se: se[idx], ebn0: ebn0[idx] };
  });
  const yHi = Math.max(...bars.map((b) => b.se)) * 1.15 || 1;
  const frame = svg.makeFrame({
    title: spec.title ?? `Spectral efficiency (Eb/N0 = ${bars[0].ebn0} dB)`,
    xLabel: "",
    yLabel: "SE (bit/s/Hz)",
    xDomain: [0, bars.length],
    yDomain: [0, yHi],
  });
  const body = frame.body.filter((s) => !s.includes(`y="${svg.HEIGHT - svg.MARGIN.bottom + 18}"`));
  bars.forEach((b, i) => {
    const x0 = frame.x(i + 0.2);
    const x1 = frame.x(i + 0.8);
    const y0 = frame.y(0);
    const y1 = frame.y(b.se);
    body.push(
      `<rect x="${x0.toFixed(2)}" y="${y1.toFixed(2)}" width="${(x1 - x0).toFixed(2)}" height="${(y0 - y1).toFixed(2)}" fill="${svg.PALETTE[i % svg.PALETTE.length]}" fill-opacity="0.8"/>`
    );
    body.push(
      `<text x="${frame.x(i + 0.5).toFixed(2)}" y="${y0 + 18}" text-anchor="middle" font-size="11">${b.label}</text>`
    );
    body.push(
      `<text x="${frame.x(i + 0.5).toFixed(2)}" y="${(y1 - 5).toFixed(2)}" text-anchor="middle" font-size="11">${b.se.toFixed(3)}</text>`
    );
  });
  return svg.document(body);
}

/** Render one figure; the SVG is only written after it builds successfully. */
export function renderFigure(spec: FigureSpec, baseDir: string): string {
  let doc: string;
  switch (spec.kind) {
    case "scatter":
      doc = scatterFigure(spec, baseDir);
      break;
    case "rcm_ccdf":
      doc = ccdfFigure(spec, baseDir);
      break;
    case "psd":
      doc = psdFigure(spec, baseDir);
      break;
    case "ber":
      doc = berFigure(spec, baseDir);
      break;
    case "se":
      doc = seFigure(spec, baseDir);
      break;
  }
  const out = resolve(baseDir, spec.output);
  writeFileSync(out, doc);
  return out;
}
