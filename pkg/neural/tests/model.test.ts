import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, it } from "vitest";

import { CheckpointUnavailable } from "../src/errors.js";
import { PRESETS, buildModel, presetFor } from "../src/model.js";

beforeAll(async () => {
  await tf.setBackend("cpu");
  await tf.ready();
});

describe("presetFor", () => {
  it("knows the built-in checkpoints", () => {
    for (const name of Object.keys(PRESETS)) {
      expect(presetFor(name).embedDim).toBeGreaterThan(0);
    }
  });

  it("raises CheckpointUnavailable for unknown names and lists the options", () => {
    expect(() => presetFor("bert-base-uncased")).toThrowError(CheckpointUnavailable);
    expect(() => presetFor("bert-base-uncased")).toThrowError(/tiny-encoder/);
  });
});

describe("buildModel", () => {
  it("outputs a 3-way distribution", () => {
    const model = buildModel("tiny-encoder", 10, 0, 0.01);
    const probs = model.predict(tf.ones([2, 10])) as tf.Tensor;
    expect(probs.shape).toEqual([2, 3]);
    const rows = probs.arraySync() as number[][];
    for (const row of rows) {
      expect(row.reduce((a, v) => a + v, 0)).toBeCloseTo(1.0, 5);
    }
  });

  it("initializes identically for the same seed and differently otherwise", () => {
    const weightsOf = (seed: number) =>
      buildModel("tiny-encoder", 10, seed, 0.01)
        .getWeights()
        .map((w) => [...w.dataSync()]);
    expect(weightsOf(7)).toEqual(weightsOf(7));
    expect(weightsOf(7)).not.toEqual(weightsOf(8));
  });

  it("sizes its layers from the preset", () => {
    const model = buildModel("wide-encoder", 12, 0, 0.01);
    const [embed, hidden, out] = model.getWeights().filter((w) => w.shape.length === 2);
    expect(embed.shape).toEqual([12, PRESETS["wide-encoder"].embedDim]);
    expect(hidden.shape).toEqual([
      PRESETS["wide-encoder"].embedDim,
      PRESETS["wide-encoder"].hiddenUnits,
    ]);
    expect(out.shape).toEqual([PRESETS["wide-encoder"].hiddenUnits, 3]);
  });
});
