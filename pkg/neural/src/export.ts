/** Reading the pipeline's neural-export JSONL.
 *
 * org rows carry {text, label}; enr rows additionally carry enriched_text,
 * which must be the original text plus a " [FEAT] ..." suffix. Every
 * violation is a BadExportSchema with the offending line number.
 */

import { readFileSync } from "node:fs";

import { BadExportSchema } from "./errors.js";
import { exportRowSchema, type ExportRow } from "./schema.js";

export const FEAT_MARKER = " [FEAT] ";

/** Parse and validate export JSONL text into rows. */
export function parseExportJsonl(raw: string): ExportRow[] {
  const rows: ExportRow[] = [];
  const lines = raw.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) {
      continue;
    }
    let obj: unknown;
    try {
      obj = JSON.parse(line);
    } catch {
      throw new BadExportSchema(`line ${i + 1}: not valid JSON`);
    }
    const parsed = exportRowSchema.safeParse(obj);
    if (!parsed.success) {
      const issue = parsed.error.issues[0];
      const where = issue.path.length ? ` at ${issue.path.join(".")}` : "";
      throw new BadExportSchema(`line ${i + 1}: ${issue.message}${where}`);
    }
    const row = parsed.data;
    if (row.enriched_text !== undefined && !row.enriched_text.startsWith(row.text + FEAT_MARKER)) {
      throw new BadExportSchema(
        `line ${i + 1}: enriched_text must be the text plus a "${FEAT_MARKER.trim()}" suffix`,
      );
    }
    rows.push(row);
  }
  return rows;
}

export function readExportJsonl(path: string): ExportRow[] {
  return parseExportJsonl(readFileSync(path, "utf-8"));
}

/** The model input for a row under the given mode. */
export function inputText(row: ExportRow, mode: "org" | "enr"): string {
  if (mode === "org") {
    return row.text;
  }
  if (row.enriched_text === undefined) {
    throw new BadExportSchema("enr mode needs enriched_text; re-export with --enrich");
  }
  return row.enriched_text;
}
