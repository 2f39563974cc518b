/** zod schemas for the two file formats shared with the cqjudge pipeline:
 * the neural-export JSONL rows it writes and the metrics JSON both sides emit.
 */

import { z } from "zod";

export const labelSchema = z.enum(["Bad", "Fair", "Good"]);
export type Label = z.infer<typeof labelSchema>;

/** Ordinals match the pipeline: Bad=0, Fair=1, Good=2. */
export const LABELS: readonly Label[] = ["Bad", "Fair", "Good"];

export const exportRowSchema = z.object({
  text: z.string().min(1),
  enriched_text: z.string().min(1).optional(),
  label: labelSchema,
});
export type ExportRow = z.infer<typeof exportRowSchema>;

const scoreTriple = z.object({
  precision: z.number().min(0).max(1),
  recall: z.number().min(0).max(1),
  f1: z.number().min(0).max(1),
});

const perClassScores = scoreTriple.extend({
  support: z.number().int().nonnegative(),
});

const confusionRow = z.tuple([
  z.number().int().nonnegative(),
  z.number().int().nonnegative(),
  z.number().int().nonnegative(),
]);

/** Shape of the evaluation report, identical to the pipeline's metrics JSON
 * so improvement() can compare reports from either component.
 */
export const metricsSchema = z.object({
  model: z.string(),
  mode: z.enum(["org", "enr"]),
  seed: z.number().int(),
  n_test: z.number().int().positive(),
  per_class: z.object({
    Bad: perClassScores,
    Fair: perClassScores,
    Good: perClassScores,
  }),
  macro: scoreTriple,
  weighted: scoreTriple,
  micro_f1: z.number().min(0).max(1),
  accuracy: z.number().min(0).max(1),
  confusion: z.tuple([confusionRow, confusionRow, confusionRow]),
  config: z.record(z.string(), z.unknown()),
  improvement_pct: z.number().nullable(),
  baseline: z.string().nullable(),
});
export type MetricsReport = z.infer<typeof metricsSchema>;
