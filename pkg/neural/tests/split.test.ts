import { describe, expect, it } from "vitest";

import { BadExportSchema } from "../src/errors.js";
import { type ExportRow, type Label } from "../src/schema.js";
import { stratifiedSplit } from "../src/split.js";

function rows(labels: Label[]): ExportRow[] {
  return labels.map((label, i) => ({ text: `row ${i}`, label }));
}

function countLabels(side: ExportRow[]): Record<string, number> {
  const counts: Record<string, number> = { Bad: 0, Fair: 0, Good: 0 };
  for (const row of side) {
    counts[row.label] += 1;
  }
  return counts;
}

describe("stratifiedSplit", () => {
  // Quota oracles taken from the pipeline's split on the same label
  // multisets: largest remainder, ties to the lower ordinal.
  it("assigns per-label quotas by largest remainder (5/3/2 -> 4/2/2)", () => {
    const labels: Label[] = [
      ...Array<Label>(5).fill("Bad"),
      ...Array<Label>(3).fill("Fair"),
      ...Array<Label>(2).fill("Good"),
    ];
    const { train, test } = stratifiedSplit(rows(labels), 0);
    expect(countLabels(train)).toEqual({ Bad: 4, Fair: 2, Good: 2 });
    expect(test).toHaveLength(2);
  });

  it("breaks remainder ties toward the lower ordinal (2/2/2 -> 2/2/1)", () => {
    const labels: Label[] = ["Bad", "Bad", "Fair", "Fair", "Good", "Good"];
    const { train, test } = stratifiedSplit(rows(labels), 3);
    expect(countLabels(train)).toEqual({ Bad: 2, Fair: 2, Good: 1 });
    expect(test.map((r) => r.label)).toEqual(["Good"]);
  });

  it("splits 100 rows 80/20 with per-label proportions within one row", () => {
    const labels: Label[] = [];
    for (let i = 0; i < 100; i++) {
      labels.push(i % 10 < 5 ? "Bad" : i % 10 < 8 ? "Fair" : "Good");
    }
    const { train, test } = stratifiedSplit(rows(labels), 11);
    expect(train).toHaveLength(80);
    expect(test).toHaveLength(20);
    const trainCounts = countLabels(train);
    expect(trainCounts).toEqual({ Bad: 40, Fair: 24, Good: 16 });
  });

  it("preserves every row exactly once and keeps input order per side", () => {
    const labels: Label[] = Array.from({ length: 30 }, (_, i) =>
      i % 3 === 0 ? "Bad" : i % 3 === 1 ? "Fair" : "Good",
    );
    const input = rows(labels);
    const { train, test } = stratifiedSplit(input, 5);
    const seen = [...train, ...test].map((r) => r.text).sort();
    expect(seen).toEqual(input.map((r) => r.text).sort());
    const indexOf = (r: ExportRow) => input.indexOf(r);
    expect(train.map(indexOf)).toEqual([...train.map(indexOf)].sort((a, b) => a - b));
    expect(test.map(indexOf)).toEqual([...test.map(indexOf)].sort((a, b) => a - b));
  });

  it("is deterministic per seed and varies across seeds", () => {
    const labels: Label[] = Array.from({ length: 60 }, (_, i) =>
      i % 4 === 0 ? "Bad" : i % 4 === 1 ? "Fair" : "Good",
    );
    const input = rows(labels);
    const a = stratifiedSplit(input, 7);
    const b = stratifiedSplit(input, 7);
    expect(a.train.map((r) => r.text)).toEqual(b.train.map((r) => r.text));
    const differing = [2, 3, 4, 5].filter(
      (seed) =>
        stratifiedSplit(input, seed)
          .train.map((r) => r.text)
          .join("|") !== a.train.map((r) => r.text).join("|"),
    );
    expect(differing.length).toBeGreaterThan(0);
  });

  it("rejects fewer than 5 rows", () => {
    expect(() => stratifiedSplit(rows(["Bad", "Fair", "Good", "Bad"]), 0)).toThrowError(
      BadExportSchema,
    );
  });
});
