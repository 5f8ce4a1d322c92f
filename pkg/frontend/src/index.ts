/**
 * TypeScript bindings for the tseq transitive sequence mining engine.
 *
 * Each call is a thin forwarding wrapper: inputs are written to the
 * engine's file formats, one CLI subcommand runs, and the outputs are
 * parsed back into columnar typed arrays. Nothing is recomputed here,
 * so the engine stays the single source of semantics.
 */

import { mkdtemp, rm } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { runEngine } from "./engine.js";
import {
  readLabeledCsv,
  readLookups,
  readMinedDir,
  readSequencesCsv,
  parsePlanTsv,
  writeDbmartCsv,
  writeLookups,
  writeSequencesCsv,
} from "./formats.js";
import type {
  ChunkPlanRow,
  ColumnarSequences,
  DbMartRow,
  EngineOptions,
  LabeledSequence,
  Lookups,
  MineOptions,
  MineResult,
  QueryOptions,
  ScreenOptions,
} from "./types.js";

export * from "./types.js";
export * from "./errors.js";
export {
  canonicalSort,
  emptySequences,
  fromRecords,
  sequenceCount,
  sequencesEqual,
  toRecords,
} from "./columnar.js";
export {
  readLabeledCsv,
  readLookups,
  readManifest,
  readMinedDir,
  readSequencesCsv,
  readTseqRecords,
  parsePlanTsv,
  writeDbmartCsv,
  writeLookups,
  writeSequencesCsv,
  writeTseqRecords,
  TSEQ_RECORD_BYTES,
} from "./formats.js";
export { engineCommand, runEngine } from "./engine.js";

async function withTempDir<T>(fn: (dir: string) => Promise<T>): Promise<T> {
  const dir = await mkdtemp(join(tmpdir(), "tseq-"));
  try {
    return await fn(dir);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

async function materializeDbmart(
  input: string | DbMartRow[],
  dir: string,
): Promise<string> {
  if (typeof input === "string") return input;
  const path = join(dir, "dbmart.csv");
  await writeDbmartCsv(path, input);
  return path;
}

/**
 * Mine every transitive sequence from a raw event table (rows or a CSV
 * path). Runs the engine in file-based mode and loads the .tseq output,
 * so the returned columns are in canonical (patient, seq, duration) order.
 */
export async function mineDbmart(
  input: string | DbMartRow[],
  options: MineOptions = {},
): Promise<MineResult> {
  return withTempDir(async (tmp) => {
    const csvPath = await materializeDbmart(input, tmp);
    const outDir = join(tmp, "mined");
    const args = [
      "mine",
      "--input",
      csvPath,
      "--mode",
      "files",
      "--output-dir",
      outDir,
    ];
    if (options.includeSameDatePairs === false) {
      args.push("--no-same-date-pairs");
    }
    if (options.firstOccurrenceOnly) args.push("--first-occurrence-only");
    if (options.maxChunkSequences !== undefined) {
      args.push("--max-chunk-sequences", String(options.maxChunkSequences));
    }
    await runEngine(args, options);
    return {
      sequences: await readMinedDir(outDir),
      lookups: await readLookups(outDir),
    };
  });
}

/** Drop sparse sequences; forwards to `tseq screen`. */
export async function sparsityScreen(
  input: ColumnarSequences,
  options: ScreenOptions = {},
): Promise<ColumnarSequences> {
  return withTempDir(async (tmp) => {
    const inPath = join(tmp, "seqs.csv");
    const outPath = join(tmp, "kept.csv");
    await writeSequencesCsv(inPath, input);
    const args = ["screen", "--input", inPath, "--output", outPath];
    if (options.threshold !== undefined) {
      args.push("--sparsity-threshold", String(options.threshold));
    }
    if (options.mode !== undefined) args.push("--sparsity-mode", options.mode);
    if (options.durationAware) args.push("--duration-sparsity");
    if (options.bucketUnit !== undefined) {
      args.push("--bucket-unit", options.bucketUnit);
    }
    if (options.bucketBits !== undefined) {
      args.push("--bucket-bits", String(options.bucketBits));
    }
    await runEngine(args, options);
    return readSequencesCsv(outPath);
  });
}

/**
 * Filter sequences by start/end code, minimum duration, or transitive
 * reachability, returning labeled rows; forwards to `tseq query`.
 */
export async function querySequences(
  input: ColumnarSequences,
  lookups: Lookups,
  options: QueryOptions = {},
): Promise<LabeledSequence[]> {
  return withTempDir(async (tmp) => {
    const inPath = join(tmp, "seqs.csv");
    const outPath = join(tmp, "query.csv");
    await writeSequencesCsv(inPath, input);
    await writeLookups(tmp, lookups);
    const args = ["query", "--input", inPath, "--output", outPath];
    if (options.transitiveFrom !== undefined) {
      args.push("--transitive-from", options.transitiveFrom);
    }
    if (options.startsWith !== undefined) {
      args.push("--starts-with", options.startsWith);
    }
    if (options.endsWith !== undefined) {
      args.push("--ends-with", options.endsWith);
    }
    if (options.minDurationDays !== undefined) {
      args.push("--min-duration-days", String(options.minDurationDays));
    }
    await runEngine(args, options);
    return readLabeledCsv(outPath);
  });
}

/** Rewrite numeric sequences with their original labels via `tseq translate`. */
export async function translate(
  input: ColumnarSequences,
  lookups: Lookups,
  options: EngineOptions = {},
): Promise<LabeledSequence[]> {
  return withTempDir(async (tmp) => {
    const inPath = join(tmp, "seqs.csv");
    const outPath = join(tmp, "translated.csv");
    await writeSequencesCsv(inPath, input);
    await writeLookups(tmp, lookups);
    const args = ["translate", "--input", inPath, "--output", outPath];
    await runEngine(args, options);
    return readLabeledCsv(outPath);
  });
}

/** Predict chunking for an event table via `tseq plan`. */
export async function planChunks(
  input: string | DbMartRow[],
  maxChunkSequences?: number,
  options: EngineOptions = {},
): Promise<ChunkPlanRow[]> {
  return withTempDir(async (tmp) => {
    const csvPath = await materializeDbmart(input, tmp);
    const args = ["plan", "--input", csvPath];
    if (maxChunkSequences !== undefined) {
      args.push("--max-chunk-sequences", String(maxChunkSequences));
    }
    const { stdout } = await runEngine(args, options);
    return parsePlanTsv(stdout);
  });
}
