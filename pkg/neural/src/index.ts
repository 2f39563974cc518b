export { BadExportSchema, CheckpointUnavailable, UsageError } from "./errors.js";
export { loadConfigFile, parseConfigFile, type ConfigValue } from "./config.js";
export {
  FEAT_MARKER,
  inputText,
  parseExportJsonl,
  readExportJsonl,
} from "./export.js";
export {
  improvementPct,
  metricsToJson,
  reportFromConfusion,
  type Confusion,
  type ReportContext,
} from "./metrics.js";
export { PRESETS, buildModel, presetFor, type Preset } from "./model.js";
export { mulberry32, permutation } from "./rng.js";
export {
  LABELS,
  exportRowSchema,
  labelSchema,
  metricsSchema,
  type ExportRow,
  type Label,
  type MetricsReport,
} from "./schema.js";
export { TRAIN_FRACTION, stratifiedSplit, type Split } from "./split.js";
export { OOV_ID, PAD_ID, bagEncode, buildVocab, encode, tokenize, type Vocab } from "./vocab.js";
export { loadCheckpoint, saveCheckpoint, type LoadedCheckpoint } from "./checkpoint.js";
export {
  DEFAULT_CONFIG,
  finetune,
  makeRunConfig,
  predictLabels,
  type FinetuneResult,
  type RunConfig,
} from "./run.js";
export { main as cliMain, run as cliRun } from "./cli.js";
