/** The fine-tuning run: export rows in, trained model and metrics out. */

import * as tf from "@tensorflow/tfjs";

import { UsageError } from "./errors.js";
import { inputText } from "./export.js";
import { reportFromConfusion, type Confusion } from "./metrics.js";
import { buildModel, presetFor } from "./model.js";
import { mulberry32, permutation } from "./rng.js";
import { LABELS, type ExportRow, type MetricsReport } from "./schema.js";
import { stratifiedSplit, TRAIN_FRACTION } from "./split.js";
import { bagEncode, buildVocab, type Vocab } from "./vocab.js";

export interface RunConfig {
  checkpoint_name: string;
  mode: "org" | "enr";
  epochs: number;
  batch_size: number;
  learning_rate: number;
  seed: number;
  max_sequence_length: number;
}

export const DEFAULT_CONFIG: Omit<RunConfig, "mode"> = {
  checkpoint_name: "tiny-encoder",
  epochs: 12,
  batch_size: 32,
  learning_rate: 0.01,
  seed: 0,
  max_sequence_length: 64,
};

export function makeRunConfig(partial: Partial<RunConfig> & { mode: RunConfig["mode"] }): RunConfig {
  const config: RunConfig = { ...DEFAULT_CONFIG, ...partial };
  if (config.mode !== "org" && config.mode !== "enr") {
    throw new UsageError(`mode must be org or enr, got ${JSON.stringify(config.mode)}`);
  }
  for (const key of ["epochs", "batch_size", "max_sequence_length"] as const) {
    if (!Number.isInteger(config[key]) || config[key] <= 0) {
      throw new UsageError(`${key} must be a positive integer, got ${config[key]}`);
    }
  }
  if (!(config.learning_rate > 0)) {
    throw new UsageError(`learning_rate must be positive, got ${config.learning_rate}`);
  }
  if (!Number.isInteger(config.seed)) {
    throw new UsageError(`seed must be an integer, got ${config.seed}`);
  }
  return config;
}

const ORDINAL: Record<string, number> = Object.fromEntries(LABELS.map((l, i) => [l, i]));

export interface FinetuneResult {
  model: tf.LayersModel;
  vocab: Vocab;
  metrics: MetricsReport;
}

function bagMatrix(vocab: Vocab, texts: string[], maxLen: number): Float32Array {
  const flat = new Float32Array(texts.length * vocab.size);
  texts.forEach((text, i) => flat.set(bagEncode(vocab, text, maxLen), i * vocab.size));
  return flat;
}

export function predictLabels(
  model: tf.LayersModel,
  vocab: Vocab,
  texts: string[],
  maxLen: number,
): number[] {
  return tf.tidy(() => {
    const xs = tf.tensor2d(bagMatrix(vocab, texts, maxLen), [texts.length, vocab.size]);
    const probs = model.predict(xs) as tf.Tensor;
    return [...probs.argMax(1).dataSync()];
  });
}

export async function finetune(
  rows: ExportRow[],
  config: RunConfig,
  log: (message: string) => void = () => {},
): Promise<FinetuneResult> {
  presetFor(config.checkpoint_name);
  await tf.setBackend("cpu");
  await tf.ready();

  const { train, test } = stratifiedSplit(rows, config.seed);
  const maxLen = config.max_sequence_length;
  const trainTexts = train.map((r) => inputText(r, config.mode));
  const testTexts = test.map((r) => inputText(r, config.mode));
  const vocab = buildVocab(trainTexts);
  log(`${train.length} train / ${test.length} test rows, vocab ${vocab.size}`);

  // One seeded shuffle up front; fit() then runs with shuffle off so the
  // batch order is reproducible. A fresh stream (seed + 1) keeps the order
  // independent of the split's draw.
  const order = permutation(train.length, mulberry32(config.seed + 1));
  const orderedTexts = order.map((i) => trainTexts[i]);
  const orderedLabels = order.map((i) => ORDINAL[train[i].label]);

  const model = buildModel(config.checkpoint_name, vocab.size, config.seed, config.learning_rate);
  const xs = tf.tensor2d(bagMatrix(vocab, orderedTexts, maxLen), [train.length, vocab.size]);
  const ys = tf.oneHot(tf.tensor1d(orderedLabels, "int32"), LABELS.length);
  try {
    await model.fit(xs, ys, {
      epochs: config.epochs,
      batchSize: config.batch_size,
      shuffle: false,
      verbose: 0,
      callbacks: {
        onEpochEnd: async (epoch, logs) => {
          const loss = logs?.loss ?? NaN;
          const acc = logs?.acc ?? NaN;
          log(`epoch ${epoch + 1}/${config.epochs} loss=${loss.toFixed(4)} acc=${acc.toFixed(4)}`);
        },
      },
    });
  } finally {
    xs.dispose();
    ys.dispose();
  }

  const predicted = predictLabels(model, vocab, testTexts, maxLen);
  const confusion: Confusion = LABELS.map(() => LABELS.map(() => 0));
  test.forEach((row, i) => {
    confusion[ORDINAL[row.label]][predicted[i]] += 1;
  });
  const metrics = reportFromConfusion(confusion, {
    model: config.checkpoint_name,
    mode: config.mode,
    seed: config.seed,
    config: {
      ...config,
      train_fraction: TRAIN_FRACTION,
      vocab_size: vocab.size,
      n_train: train.length,
    },
  });
  return { model, vocab, metrics };
}
