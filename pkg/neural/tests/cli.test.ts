import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, describe, expect, it, vi } from "vitest";

import { main, run } from "../src/cli.js";
import { metricsSchema } from "../src/schema.js";

const FIXTURES = fileURLToPath(new URL("../fixtures", import.meta.url));
const ORG_JSONL = join(FIXTURES, "sample_org.jsonl");

const tmpDirs: string[] = [];
function tmp(): string {
  const dir = mkdtempSync(join(tmpdir(), "cq-neural-cli-"));
  tmpDirs.push(dir);
  return dir;
}
afterAll(() => {
  for (const dir of tmpDirs) {
    rmSync(dir, { recursive: true, force: true });
  }
});

describe("cli run", () => {
  it("trains from flags and writes schema-valid metrics", async () => {
    const dir = tmp();
    const out = join(dir, "metrics.json");
    const code = await run([
      "--export",
      ORG_JSONL,
      "--mode",
      "org",
      "--epochs",
      "1",
      "--out",
      out,
      "--quiet",
    ]);
    expect(code).toBe(0);
    const metrics = metricsSchema.parse(JSON.parse(readFileSync(out, "utf-8")));
    expect(metrics.mode).toBe("org");
    expect(metrics.config.epochs).toBe(1);
  }, 60_000);

  it("reads the config file and lets flags override it", async () => {
    const dir = tmp();
    const out = join(dir, "metrics.json");
    const conf = join(dir, "run.conf");
    writeFileSync(
      conf,
      [
        `export = "${ORG_JSONL}"`,
        "mode = org",
        "epochs = 3",
        "batch-size = 16",
        "seed = 9",
        `out = "${out}"`,
      ].join("\n") + "\n",
    );
    const code = await run(["--config", conf, "--epochs", "1", "--quiet"]);
    expect(code).toBe(0);
    const metrics = metricsSchema.parse(JSON.parse(readFileSync(out, "utf-8")));
    expect(metrics.config.epochs).toBe(1); // flag wins
    expect(metrics.config.batch_size).toBe(16); // file fills the rest
    expect(metrics.seed).toBe(9);
  }, 60_000);

  it("computes improvement against a baseline metrics file", async () => {
    const dir = tmp();
    const orgOut = join(dir, "org.json");
    const enrOut = join(dir, "enr.json");
    const enrJsonl = join(FIXTURES, "synthetic_enr.jsonl");
    const common = ["--epochs", "2", "--quiet", "--export", enrJsonl];
    expect(await run([...common, "--mode", "org", "--out", orgOut])).toBe(0);
    expect(await run([...common, "--mode", "enr", "--out", enrOut, "--baseline", orgOut])).toBe(0);
    const org = metricsSchema.parse(JSON.parse(readFileSync(orgOut, "utf-8")));
    const enr = metricsSchema.parse(JSON.parse(readFileSync(enrOut, "utf-8")));
    expect(org.improvement_pct).toBeNull();
    expect(enr.baseline).toBe("tiny-encoder:org:seed=0");
    expect(enr.improvement_pct).toBe(
      Math.round(((100 * (enr.macro.f1 - org.macro.f1)) / org.macro.f1) * 10) / 10,
    );
  }, 120_000);

  it("writes a loadable checkpoint directory when asked", async () => {
    const dir = tmp();
    const code = await run([
      "--export",
      ORG_JSONL,
      "--mode",
      "org",
      "--epochs",
      "1",
      "--out",
      join(dir, "m.json"),
      "--checkpoint-dir",
      join(dir, "ckpt"),
      "--quiet",
    ]);
    expect(code).toBe(0);
    const manifest = JSON.parse(readFileSync(join(dir, "ckpt", "model.json"), "utf-8"));
    expect(manifest.weightSpecs.length).toBeGreaterThan(0);
    const vocab = JSON.parse(readFileSync(join(dir, "ckpt", "vocab.json"), "utf-8"));
    expect(vocab.tokens.length).toBeGreaterThan(10);
  }, 60_000);
});

describe("cli main exit codes", () => {
  it("returns 1 and prints usage error for missing mode", async () => {
    const errors = vi.spyOn(console, "error").mockImplementation(() => {});
    try {
      expect(await main(["--export", ORG_JSONL])).toBe(1);
      expect(errors.mock.calls.join("\n")).toMatch(/usage error: mode/);
    } finally {
      errors.mockRestore();
    }
  });

  it("returns 1 for unknown flags", async () => {
    const errors = vi.spyOn(console, "error").mockImplementation(() => {});
    try {
      expect(await main(["--export", ORG_JSONL, "--mode", "org", "--bogus"])).toBe(1);
    } finally {
      errors.mockRestore();
    }
  });

  it("returns 2 for an unknown checkpoint", async () => {
    const errors = vi.spyOn(console, "error").mockImplementation(() => {});
    try {
      expect(
        await main([
          "--export",
          ORG_JSONL,
          "--mode",
          "org",
          "--checkpoint",
          "bert-base-uncased",
          "--quiet",
        ]),
      ).toBe(2);
      expect(errors.mock.calls.join("\n")).toMatch(/error: unknown checkpoint/);
    } finally {
      errors.mockRestore();
    }
  });

  it("returns 2 for a malformed export file", async () => {
    const dir = tmp();
    const bad = join(dir, "bad.jsonl");
    writeFileSync(bad, '{"text": "a"}\n');
    const errors = vi.spyOn(console, "error").mockImplementation(() => {});
    try {
      expect(await main(["--export", bad, "--mode", "org", "--quiet"])).toBe(2);
    } finally {
      errors.mockRestore();
    }
  });

  it("returns 3 when the export file does not exist", async () => {
    const errors = vi.spyOn(console, "error").mockImplementation(() => {});
    try {
      expect(await main(["--export", "/nonexistent/rows.jsonl", "--mode", "org"])).toBe(3);
    } finally {
      errors.mockRestore();
    }
  });
});
