import { z } from "zod";

const series = z.object({ label: z.string(), csv: z.string() });

const scatterSpec = z.object({
  kind: z.literal("scatter"),
  output: z.string(),
  title: z.string().optional(),
  input: z.string(),
});

const ccdfSpec = z.object({
  kind: z.literal("rcm_ccdf"),
  output: z.string(),
  title: z.string().optional(),
  input: z.string(),
});

const psdSpec = z.object({
  kind: z.literal("psd"),
  output: z.string(),
  title: z.string().optional(),
  input: z.string(),
  // SEM overlay: limit beyond +/- bw/2 from the subband center
  mask: z
    .object({ limit_dbm: z.number(), bw_hz: z.number() })
    .optional(),
});

const berSpec = z.object({
  kind: z.literal("ber"),
  output: z.string(),
  title: z.string().optional(),
  inputs: z.array(series).min(1),
});

const seSpec = z.object({
  kind: z.literal("se"),
  output: z.string(),
  title: z.string().optional(),
  inputs: z.array(series).min(1),
  // which Eb/N0 row to chart; defaults to the last row of each CSV
  ebn0_db: z.number().optional(),
});

export const figureSpec = z.discriminatedUnion("kind", [
  scatterSpec,
  ccdfSpec,
  psdSpec,
  berSpec,
  seSpec,
]);

export const specFile = z.union([
  figureSpec,
  z.object({ figures: z.array(figureSpec).min(1) }),
]);

export type FigureSpec = z.infer<typeof figureSpec>;

export function parseSpec(json: unknown): FigureSpec[] {
  const parsed = specFile.parse(json);
  return "figures" in parsed ? parsed.figures : [parsed];
}
