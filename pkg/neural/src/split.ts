/** Seeded stratified train/test split.
 *
 * Mirrors the pipeline's split rules: train size is round(fraction * N)
 * clamped so neither side is empty, per-label train quotas are assigned by
 * largest remainder (ties to the lower label ordinal), and rows keep their
 * original order within each side. Only the shuffle source differs, so the
 * same seed gives the same split SHAPE (sizes and per-label counts), not the
 * same row assignment, across the two components.
 */

import { BadExportSchema } from "./errors.js";
import { mulberry32, permutation } from "./rng.js";
import { LABELS, type ExportRow } from "./schema.js";

export const TRAIN_FRACTION = 0.8;

export interface Split {
  train: ExportRow[];
  test: ExportRow[];
}

export function stratifiedSplit(rows: ExportRow[], seed: number): Split {
  const n = rows.length;
  if (n < 5) {
    throw new BadExportSchema(`need at least 5 labeled rows to split, got ${n}`);
  }
  let nTrain = Math.floor(TRAIN_FRACTION * n + 0.5);
  nTrain = Math.max(1, Math.min(n - 1, nTrain));

  const counts = new Map<string, number>(LABELS.map((l) => [l, 0]));
  for (const row of rows) {
    counts.set(row.label, (counts.get(row.label) ?? 0) + 1);
  }
  const quota = new Map<string, number>();
  let baseTotal = 0;
  const remainders: Array<{ frac: number; ordinal: number }> = [];
  LABELS.forEach((label, ordinal) => {
    const exact = ((counts.get(label) ?? 0) * nTrain) / n;
    const base = Math.floor(exact);
    quota.set(label, base);
    baseTotal += base;
    remainders.push({ frac: exact - base, ordinal });
  });
  remainders.sort((a, b) => b.frac - a.frac || a.ordinal - b.ordinal);
  for (const { ordinal } of remainders.slice(0, nTrain - baseTotal)) {
    const label = LABELS[ordinal];
    quota.set(label, (quota.get(label) ?? 0) + 1);
  }

  const order = permutation(n, mulberry32(seed));
  const taken = new Map<string, number>(LABELS.map((l) => [l, 0]));
  const inTrain = new Array<boolean>(n).fill(false);
  for (const i of order) {
    const label = rows[i].label;
    if ((taken.get(label) ?? 0) < (quota.get(label) ?? 0)) {
      taken.set(label, (taken.get(label) ?? 0) + 1);
      inTrain[i] = true;
    }
  }
  return {
    train: rows.filter((_, i) => inTrain[i]),
    test: rows.filter((_, i) => !inTrain[i]),
  };
}
