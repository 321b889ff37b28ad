import { readFileSync } from "fs";
import Papa from "papaparse";

export interface CsvTable {
  /** provenance comment lines ("# config_hash=... seed=...") */
  provenance: string[];
  columns: string[];
  rows: Record<string, number | string>[];
}

/**
 * Load a harness CSV: leading `#` comment lines are provenance metadata, the
 * first real line is the header. Numeric cells are converted; `nan` becomes
 * NaN so downstream filters can drop it.
 */
export function loadCsv(path: string, required: string[] = []): CsvTable {
  const raw = readFileSync(path, "utf-8");
  const lines = raw.split(/\r?\n/);
  const provenance = lines.filter((l) => l.startsWith("#"));
  const body = lines.filter((l) => !l.startsWith("#")).join("\n");

  const parsed = Papa.parse<Record<string, number | string>>(body, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`${path}: CSV parse error at row ${e.row}: ${e.message}`);
  }

  const columns = parsed.meta.fields ?? [];
  for (const col of required) {
    if (!columns.includes(col)) {
      throw new Error(
        `${path}: missing required column "${col}" (found: ${columns.join(", ")})`
      );
    }
  }
  return { provenance, columns, rows: parsed.data };
}

/** Numeric column accessor; "nan" strings map to NaN. */
export function column(table: CsvTable, name: string): number[] {
  if (!table.columns.includes(name)) {
    throw new Error(`missing required column "${name}"`);
  }
  return table.rows.map((r) => {
    const v = r[name];
    if (typeof v === "number") return v;
    const n = Number(v);
    return Number.isNaN(n) ? NaN : n;
  });
}
