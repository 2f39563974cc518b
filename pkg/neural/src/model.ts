/** Text classifier architectures, selected by checkpoint name.
 *
 * Each preset is a small randomly initialized encoder: averaged token
 * embeddings, one hidden layer, and a 3-way softmax. The averaging is
 * written as a single bias-free linear layer over the count-normalized
 * token bag, which computes exactly the mean of the tokens' embedding rows
 * but trains orders of magnitude faster on the pure-JS CPU backend (one
 * matmul gradient instead of a scatter over every token position).
 * All initializers take their seed from the run config, so a fixed seed
 * gives identical starting weights.
 */

import * as tf from "@tensorflow/tfjs";

import { CheckpointUnavailable } from "./errors.js";

export interface Preset {
  embedDim: number;
  hiddenUnits: number;
}

export const PRESETS: Record<string, Preset> = {
  "tiny-encoder": { embedDim: 16, hiddenUnits: 16 },
  "base-encoder": { embedDim: 32, hiddenUnits: 32 },
  "wide-encoder": { embedDim: 64, hiddenUnits: 48 },
};

export function presetFor(checkpointName: string): Preset {
  const preset = PRESETS[checkpointName];
  if (!preset) {
    const known = Object.keys(PRESETS).sort().join(", ");
    throw new CheckpointUnavailable(`unknown checkpoint "${checkpointName}" (available: ${known})`);
  }
  return preset;
}

export function buildModel(
  checkpointName: string,
  vocabSize: number,
  seed: number,
  learningRate: number,
): tf.LayersModel {
  const preset = presetFor(checkpointName);
  const model = tf.sequential();
  model.add(
    tf.layers.dense({
      units: preset.embedDim,
      useBias: false,
      inputShape: [vocabSize],
      name: "embed",
      kernelInitializer: tf.initializers.randomUniform({
        minval: -0.05,
        maxval: 0.05,
        seed,
      }),
    }),
  );
  model.add(
    tf.layers.dense({
      units: preset.hiddenUnits,
      activation: "relu",
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
    }),
  );
  model.add(
    tf.layers.dense({
      units: 3,
      activation: "softmax",
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 2 }),
    }),
  );
  model.compile({
    optimizer: tf.train.adam(learningRate),
    loss: "categoricalCrossentropy",
    metrics: ["accuracy"],
  });
  return model;
}
