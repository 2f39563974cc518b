/** Saving and restoring a fine-tuned model together with its vocabulary.
 *
 * A checkpoint directory holds model.json (topology + weight manifest),
 * weights.bin, and vocab.json (token table plus sequence length), which is
 * everything needed to encode new text and predict.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import * as tf from "@tensorflow/tfjs";

import { type Vocab } from "./vocab.js";

function concatBuffers(data: ArrayBuffer | ArrayBuffer[]): ArrayBuffer {
  if (!Array.isArray(data)) {
    return data;
  }
  const total = data.reduce((acc, b) => acc + b.byteLength, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const buf of data) {
    out.set(new Uint8Array(buf), offset);
    offset += buf.byteLength;
  }
  return out.buffer;
}

export async function saveCheckpoint(
  dir: string,
  model: tf.LayersModel,
  vocab: Vocab,
  maxLen: number,
): Promise<void> {
  mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      writeFileSync(
        join(dir, "model.json"),
        JSON.stringify({
          format: "layers-model",
          modelTopology: artifacts.modelTopology,
          weightSpecs: artifacts.weightSpecs,
        }),
      );
      const weights = concatBuffers(artifacts.weightData ?? new ArrayBuffer(0));
      writeFileSync(join(dir, "weights.bin"), Buffer.from(weights));
      return { modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: "JSON" } };
    }),
  );
  const tokens = [...vocab.index.entries()].sort((a, b) => a[1] - b[1]).map(([t]) => t);
  writeFileSync(join(dir, "vocab.json"), JSON.stringify({ tokens, max_sequence_length: maxLen }));
}

export interface LoadedCheckpoint {
  model: tf.LayersModel;
  vocab: Vocab;
  maxLen: number;
}

export async function loadCheckpoint(dir: string): Promise<LoadedCheckpoint> {
  const manifest = JSON.parse(readFileSync(join(dir, "model.json"), "utf-8"));
  const weightData = readFileSync(join(dir, "weights.bin"));
  const model = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: manifest.modelTopology,
      weightSpecs: manifest.weightSpecs,
      weightData: weightData.buffer.slice(
        weightData.byteOffset,
        weightData.byteOffset + weightData.byteLength,
      ),
    }),
  );
  const vocabFile = JSON.parse(readFileSync(join(dir, "vocab.json"), "utf-8"));
  const index = new Map<string, number>();
  (vocabFile.tokens as string[]).forEach((token, i) => index.set(token, i + 2));
  return {
    model,
    vocab: { index, size: index.size + 2 },
    maxLen: vocabFile.max_sequence_length as number,
  };
}
