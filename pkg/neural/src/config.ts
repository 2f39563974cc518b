/** Flat "key = value" config files, the same grammar the cqjudge CLI reads:
 * '#' starts a comment, strings may be quoted, bare true/false and numbers
 * are typed, dashes in keys normalize to underscores. Command-line flags
 * override file values.
 */

import { readFileSync } from "node:fs";

import { UsageError } from "./errors.js";

export type ConfigValue = string | number | boolean;

export function parseConfigFile(raw: string, path = "<config>"): Record<string, ConfigValue> {
  const values: Record<string, ConfigValue> = {};
  raw.split("\n").forEach((rawLine, i) => {
    const hash = rawLine.indexOf("#");
    const line = (hash >= 0 ? rawLine.slice(0, hash) : rawLine).trim();
    if (!line) {
      return;
    }
    const eq = line.indexOf("=");
    if (eq < 0) {
      throw new UsageError(`${path}:${i + 1}: expected key = value, got ${JSON.stringify(rawLine)}`);
    }
    const key = line.slice(0, eq).trim().replace(/-/g, "_");
    const value = line.slice(eq + 1).trim();
    values[key] = parseValue(value);
  });
  return values;
}

function parseValue(value: string): ConfigValue {
  if (
    value.length >= 2 &&
    (value.startsWith('"') || value.startsWith("'")) &&
    value.endsWith(value[0])
  ) {
    return value.slice(1, -1);
  }
  const lower = value.toLowerCase();
  if (lower === "true" || lower === "false") {
    return lower === "true";
  }
  if (/^[+-]?\d+$/.test(value)) {
    return parseInt(value, 10);
  }
  const num = Number(value);
  if (value !== "" && Number.isFinite(num)) {
    return num;
  }
  return value;
}

export function loadConfigFile(path: string): Record<string, ConfigValue> {
  return parseConfigFile(readFileSync(path, "utf-8"), path);
}
