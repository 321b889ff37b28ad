#!/usr/bin/env node
/**
 * Figure renderer for the CPS-OFDM simulator CSVs.
 *
 * Usage:
 *   cpsofdm-plots render --spec <figures.json>
 *
 * The spec file holds either one figure object or {"figures": [...]};
 * CSV and output paths are resolved relative to the spec file.
 */

import { readFileSync } from "fs";
import path from "path";

import { renderFigure } from "./figures.js";
import { parseSpec } from "./spec.js";

export function main(argv: string[]): number {
  const [cmd, ...rest] = argv;
  if (cmd !== "render") {
    console.error("usage: cpsofdm-plots render --spec <file>");
    return 2;
  }
  const i = rest.indexOf("--spec");
  if (i < 0 || i + 1 >= rest.length) {
    console.error("error: render requires --spec <file>");
    return 2;
  }
  const specPath = rest[i + 1];
  try {
    const figures = parseSpec(JSON.parse(readFileSync(specPath, "utf-8")));
    const baseDir = path.dirname(path.resolve(specPath));
    for (const fig of figures) {
      console.log(renderFigure(fig, baseDir));
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
