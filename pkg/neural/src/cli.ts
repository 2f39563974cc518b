#!/usr/bin/env node
/** Standalone command: fine-tune on an export JSONL and write metrics JSON.
 *
 * Values resolve flag > config file > built-in default, exactly like the
 * cqjudge CLI. Exit codes also match it: 1 usage, 2 domain error, 3 I/O.
 */

import { realpathSync, writeFileSync } from "node:fs";
import { readFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { loadConfigFile, type ConfigValue } from "./config.js";
import { BadExportSchema, CheckpointUnavailable, UsageError } from "./errors.js";
import { readExportJsonl } from "./export.js";
import { improvementPct, metricsToJson } from "./metrics.js";
import { PRESETS } from "./model.js";
import { finetune, makeRunConfig, DEFAULT_CONFIG, type RunConfig } from "./run.js";
import { saveCheckpoint } from "./checkpoint.js";
import { metricsSchema } from "./schema.js";

function buildParser(argv: string[]) {
  const presets = Object.keys(PRESETS).sort().join(", ");
  return yargs(argv)
    .scriptName("cq-neural")
    .usage("$0 --export rows.jsonl --mode enr --out metrics.json")
    .option("export", { type: "string", describe: "export JSONL written by `cqjudge export`" })
    .option("mode", { type: "string", describe: "org (raw text) or enr (feature-suffixed text)" })
    .option("out", { type: "string", describe: "metrics JSON output path (default metrics.json)" })
    .option("checkpoint-dir", { type: "string", describe: "save the trained model here" })
    .option("baseline", { type: "string", describe: "metrics JSON to compute improvement against" })
    .option("config", { type: "string", describe: "key = value config file; flags override it" })
    .option("checkpoint", { type: "string", describe: `architecture preset (${presets})` })
    .option("epochs", { type: "number", describe: `training epochs (default ${DEFAULT_CONFIG.epochs})` })
    .option("batch-size", { type: "number", describe: `batch size (default ${DEFAULT_CONFIG.batch_size})` })
    .option("learning-rate", { type: "number", describe: `adam step size (default ${DEFAULT_CONFIG.learning_rate})` })
    .option("seed", { type: "number", describe: `split/init/order seed (default ${DEFAULT_CONFIG.seed})` })
    .option("max-sequence-length", { type: "number", describe: `token cap per input (default ${DEFAULT_CONFIG.max_sequence_length})` })
    .option("quiet", { type: "boolean", default: false, describe: "suppress progress lines" })
    .strict()
    .help()
    .version(false)
    .exitProcess(false)
    .fail((msg, err) => {
      if (err) {
        throw err;
      }
      throw new UsageError(msg);
    });
}

export async function run(argv: string[]): Promise<number> {
  const args = await buildParser(argv).parseAsync();
  if (args.help) {
    return 0;
  }
  const file: Record<string, ConfigValue> = args.config ? loadConfigFile(args.config) : {};
  const pick = <T extends ConfigValue>(flag: T | undefined, key: string, fallback?: T): T | undefined =>
    flag !== undefined ? flag : key in file ? (file[key] as T) : fallback;

  const exportPath = pick<string>(args.export, "export");
  if (!exportPath) {
    throw new UsageError("--export (or export= in the config file) is required");
  }
  const mode = pick<string>(args.mode, "mode");
  if (mode !== "org" && mode !== "enr") {
    throw new UsageError(`mode must be org or enr, got ${JSON.stringify(mode ?? null)}`);
  }
  const out = pick<string>(args.out, "out", "metrics.json")!;
  const checkpointDir = pick<string>(args.checkpointDir, "checkpoint_dir");
  const baselinePath = pick<string>(args.baseline, "baseline");

  const config: RunConfig = makeRunConfig({
    mode,
    checkpoint_name: pick<string>(args.checkpoint, "checkpoint_name", DEFAULT_CONFIG.checkpoint_name)!,
    epochs: pick<number>(args.epochs, "epochs", DEFAULT_CONFIG.epochs)!,
    batch_size: pick<number>(args.batchSize, "batch_size", DEFAULT_CONFIG.batch_size)!,
    learning_rate: pick<number>(args.learningRate, "learning_rate", DEFAULT_CONFIG.learning_rate)!,
    seed: pick<number>(args.seed, "seed", DEFAULT_CONFIG.seed)!,
    max_sequence_length: pick<number>(
      args.maxSequenceLength,
      "max_sequence_length",
      DEFAULT_CONFIG.max_sequence_length,
    )!,
  });

  const log = args.quiet ? () => {} : (message: string) => console.log(`cq-neural: ${message}`);
  const rows = readExportJsonl(exportPath);
  log(`${rows.length} rows from ${exportPath} (${config.mode} mode, ${config.checkpoint_name})`);

  const { model, vocab, metrics } = await finetune(rows, config, log);
  let report = metrics;
  if (baselinePath) {
    const baseline = metricsSchema.parse(JSON.parse(readFileSync(baselinePath, "utf-8")));
    report = {
      ...metrics,
      improvement_pct: improvementPct(baseline.macro.f1, metrics.macro.f1),
      baseline: `${baseline.model}:${baseline.mode}:seed=${baseline.seed}`,
    };
  }
  writeFileSync(out, metricsToJson(report));
  log(`macro-F1 ${report.macro.f1.toFixed(4)} on ${report.n_test} test rows -> ${out}`);
  if (report.improvement_pct !== null) {
    log(`improvement over ${report.baseline}: ${report.improvement_pct}%`);
  }
  if (checkpointDir) {
    await saveCheckpoint(checkpointDir, model, vocab, config.max_sequence_length);
    log(`checkpoint saved to ${checkpointDir}`);
  }
  return 0;
}

export async function main(argv: string[]): Promise<number> {
  try {
    return await run(argv);
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`usage error: ${err.message}`);
      return 1;
    }
    if (err instanceof BadExportSchema || err instanceof CheckpointUnavailable) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err) {
      console.error(`error: ${err.message}`);
      return 3;
    }
    throw err;
  }
}

const invokedPath = process.argv[1] ? pathToFileURL(realpathSync(process.argv[1])).href : "";
if (import.meta.url === invokedPath) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
