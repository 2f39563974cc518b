/** Error types shared across the harness. */

/** The export JSONL does not match the expected row shape. */
export class BadExportSchema extends Error {
  constructor(message: string) {
    super(message);
    this.name = "BadExportSchema";
  }
}

/** The requested checkpoint name is not one of the built-in presets. */
export class CheckpointUnavailable extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CheckpointUnavailable";
  }
}

/** Command-line or config-file misuse. */
export class UsageError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "UsageError";
  }
}
