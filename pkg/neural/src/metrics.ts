/** Evaluation metrics in the pipeline's metrics JSON shape.
 *
 * The math mirrors the pipeline exactly: per-class precision/recall/F1 with
 * 0.0 for empty denominators, unweighted macro averages, support-weighted
 * averages, and micro-F1 equal to accuracy (single-label multiclass).
 * Confusion rows are truth Bad/Fair/Good, columns are predictions.
 */

import { LABELS, type MetricsReport } from "./schema.js";

export type Confusion = number[][];

function prf(tp: number, fp: number, fn: number): [number, number, number] {
  const precision = tp + fp ? tp / (tp + fp) : 0.0;
  const recall = tp + fn ? tp / (tp + fn) : 0.0;
  const f1 = precision + recall ? (2 * precision * recall) / (precision + recall) : 0.0;
  return [precision, recall, f1];
}

export interface ReportContext {
  model: string;
  mode: "org" | "enr";
  seed: number;
  config?: Record<string, unknown>;
}

export function reportFromConfusion(confusion: Confusion, ctx: ReportContext): MetricsReport {
  const n = confusion.reduce((acc, row) => acc + row.reduce((a, v) => a + v, 0), 0);
  if (n === 0) {
    throw new Error("confusion matrix is empty");
  }
  const perClass = {} as MetricsReport["per_class"];
  let macroP = 0;
  let macroR = 0;
  let macroF = 0;
  let weightedP = 0;
  let weightedR = 0;
  let weightedF = 0;
  let correct = 0;
  LABELS.forEach((label, k) => {
    const tp = confusion[k][k];
    const fp = confusion.reduce((acc, row) => acc + row[k], 0) - tp;
    const fn = confusion[k].reduce((a, v) => a + v, 0) - tp;
    correct += tp;
    const [precision, recall, f1] = prf(tp, fp, fn);
    const support = confusion[k].reduce((a, v) => a + v, 0);
    perClass[label] = { precision, recall, f1, support };
    macroP += precision / LABELS.length;
    macroR += recall / LABELS.length;
    macroF += f1 / LABELS.length;
    weightedP += (precision * support) / n;
    weightedR += (recall * support) / n;
    weightedF += (f1 * support) / n;
  });
  const accuracy = correct / n;
  return {
    model: ctx.model,
    mode: ctx.mode,
    seed: ctx.seed,
    n_test: n,
    per_class: perClass,
    macro: { precision: macroP, recall: macroR, f1: macroF },
    weighted: { precision: weightedP, recall: weightedR, f1: weightedF },
    micro_f1: accuracy,
    accuracy,
    confusion: confusion.map((row) => [...row]) as MetricsReport["confusion"],
    config: ctx.config ?? {},
    improvement_pct: null,
    baseline: null,
  };
}

/** Relative macro-F1 change in percent, rounded to 1 decimal. */
export function improvementPct(orgF1: number, enrF1: number): number {
  if (orgF1 === 0.0) {
    throw new Error("baseline F1 is zero; relative improvement undefined");
  }
  return Math.round((100.0 * (enrF1 - orgF1)) / orgF1 * 10) / 10;
}

/** Serialize like the pipeline does: sorted keys, 2-space indent, final newline. */
export function metricsToJson(report: MetricsReport): string {
  const sortKeys = (value: unknown): unknown => {
    if (Array.isArray(value)) {
      return value.map(sortKeys);
    }
    if (value && typeof value === "object") {
      const src = value as Record<string, unknown>;
      return Object.fromEntries(
        Object.keys(src)
          .sort()
          .map((k) => [k, sortKeys(src[k])]),
      );
    }
    return value;
  };
  return JSON.stringify(sortKeys(report), null, 2) + "\n";
}
