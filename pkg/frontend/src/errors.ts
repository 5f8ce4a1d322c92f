/**
 * Typed errors mirroring the engine CLI's exit-code contract:
 * 1 is a usage error, 2 a data error; anything else is an engine failure.
 */

export class TseqError extends Error {
  constructor(
    message: string,
    readonly exitCode: number | null = null,
    readonly stderr: string = "",
  ) {
    super(message);
    this.name = new.target.name;
  }
}

/** Bad flags or arguments (CLI exit code 1). */
export class UsageError extends TseqError {}

/** Malformed or out-of-contract input data (CLI exit code 2). */
export class DataError extends TseqError {}

/** The engine crashed, is missing, or produced unreadable output. */
export class EngineError extends TseqError {}

/** Build the matching error class for a CLI exit code. */
export function errorForExit(
  exitCode: number | null,
  stderr: string,
): TseqError {
  const detail = stderr.trim() || `engine exited with code ${exitCode}`;
  if (exitCode === 1) return new UsageError(detail, exitCode, stderr);
  if (exitCode === 2) return new DataError(detail, exitCode, stderr);
  return new EngineError(detail, exitCode, stderr);
}
