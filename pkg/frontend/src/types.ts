/**
 * Shared types for the tseq bindings.
 *
 * Sequence data crosses the engine boundary in columnar form: three parallel
 * typed arrays of equal length, matching the engine's own memory layout
 * (u32 patient id, u64 packed sequence id, u32 duration in days).
 */

export interface ColumnarSequences {
  patient: Uint32Array;
  seq: BigUint64Array;
  duration: Uint32Array;
}

/** One raw event-table row before mining. */
export interface DbMartRow {
  patient: string;
  date: string; // ISO YYYY-MM-DD
  phenx: string;
}

/** Reversible label/id maps produced by ingestion. */
export interface Lookups {
  phenxToId: Map<string, number>;
  idToPhenx: string[];
  patientToId: Map<string, number>;
  idToPatient: string[];
}

/** One row of `tseq query` / `tseq translate` output. */
export interface LabeledSequence {
  patient: string;
  startPhenx: string;
  endPhenx: string;
  durationDays: number;
}

/** One row of the chunk plan TSV. */
export interface ChunkPlanRow {
  chunk: number;
  firstPatient: number;
  lastPatient: number;
  patients: number;
  predictedSequences: number;
}

/** One row of a file-based mining manifest. */
export interface ManifestEntry {
  patient: number;
  file: string;
  count: number;
}

export interface MineResult {
  sequences: ColumnarSequences;
  lookups: Lookups;
}

export interface EngineOptions {
  /** Command used to invoke the engine CLI; defaults to $TSEQ_BIN or "tseq". */
  bin?: string[];
  /** Worker count passed as --threads; output bytes never depend on it. */
  threads?: number;
}

export interface MineOptions extends EngineOptions {
  includeSameDatePairs?: boolean; // default true
  firstOccurrenceOnly?: boolean;
  maxChunkSequences?: number;
}

export interface ScreenOptions extends EngineOptions {
  threshold?: number; // default 2
  mode?: "occurrences" | "distinct_patients";
  durationAware?: boolean;
  bucketUnit?: "days" | "weeks" | "months" | "years";
  bucketBits?: number;
}

export interface QueryOptions extends EngineOptions {
  startsWith?: string;
  endsWith?: string;
  minDurationDays?: number;
  transitiveFrom?: string;
}
