/** Subprocess plumbing: every binding call forwards to the engine CLI. */

import { execFile } from "node:child_process";
import { promisify } from "node:util";

import { EngineError, errorForExit } from "./errors.js";
import type { EngineOptions } from "./types.js";

const execFileAsync = promisify(execFile);

// Mined outputs can be large; CSV for ~10M records exceeds node's 1 MiB default.
const MAX_OUTPUT_BYTES = 1 << 28;

/** Resolve the CLI invocation: options.bin, then $TSEQ_BIN, then "tseq". */
export function engineCommand(options: EngineOptions = {}): string[] {
  if (options.bin !== undefined && options.bin.length > 0) {
    return [...options.bin];
  }
  const fromEnv = process.env.TSEQ_BIN;
  if (fromEnv !== undefined && fromEnv !== "") {
    return fromEnv.split(" ");
  }
  return ["tseq"];
}

/**
 * Run one engine subcommand and return its stdout/stderr.
 * Exit code 1 raises UsageError, 2 raises DataError, anything else
 * (including spawn failures) raises EngineError.
 */
export async function runEngine(
  args: string[],
  options: EngineOptions = {},
): Promise<{ stdout: string; stderr: string }> {
  const [command, ...prefix] = engineCommand(options);
  const argv = [...prefix];
  if (options.threads !== undefined) {
    // global option, must precede the subcommand
    argv.push("--threads", String(options.threads));
  }
  argv.push(...args);
  try {
    return await execFileAsync(command, argv, { maxBuffer: MAX_OUTPUT_BYTES });
  } catch (err) {
    const failure = err as NodeJS.ErrnoException & {
      code?: number | string;
      stdout?: string;
      stderr?: string;
    };
    if (typeof failure.code === "string") {
      throw new EngineError(
        `failed to launch ${command}: ${failure.code}`,
        null,
        failure.stderr ?? "",
      );
    }
    throw errorForExit(
      typeof failure.code === "number" ? failure.code : null,
      failure.stderr ?? "",
    );
  }
}
