/**
 * Readers and writers for the engine's exchange formats: dbmart CSV,
 * numeric sequence CSV, lookup TSVs, the chunk-plan TSV, and the .tseq
 * binary mining output with its manifest.
 */

import { readFile, writeFile } from "node:fs/promises";
import { join } from "node:path";
import Papa from "papaparse";

import { allocSequences, emptySequences } from "./columnar.js";
import { DataError } from "./errors.js";
import type {
  ChunkPlanRow,
  ColumnarSequences,
  DbMartRow,
  LabeledSequence,
  Lookups,
  ManifestEntry,
} from "./types.js";

export const TSEQ_RECORD_BYTES = 12; // u64 seq + u32 duration, little endian

const SEQUENCE_COLUMNS = ["patient_num", "sequence", "duration_days"] as const;
const LABELED_COLUMNS = [
  "patient",
  "start_phenx",
  "end_phenx",
  "duration_days",
] as const;

function parseCsv(text: string, required: readonly string[]): string[][] {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new DataError(`CSV parse failed: ${parsed.errors[0].message}`);
  }
  const [header, ...rows] = parsed.data;
  if (header === undefined) throw new DataError("CSV is empty");
  for (const column of required) {
    if (!header.includes(column)) {
      throw new DataError(`missing required column ${column}`);
    }
  }
  const positions = required.map((column) => header.indexOf(column));
  return rows.map((row) => positions.map((i) => row[i]));
}

// --- sequence CSV (patient_num,sequence,duration_days) ---

export async function readSequencesCsv(
  path: string,
): Promise<ColumnarSequences> {
  const rows = parseCsv(await readFile(path, "utf-8"), SEQUENCE_COLUMNS);
  const seqs = allocSequences(rows.length);
  rows.forEach(([patient, seq, duration], i) => {
    seqs.patient[i] = Number(patient);
    seqs.seq[i] = BigInt(seq);
    seqs.duration[i] = Number(duration);
  });
  return seqs;
}

export async function writeSequencesCsv(
  path: string,
  seqs: ColumnarSequences,
): Promise<void> {
  const lines = [SEQUENCE_COLUMNS.join(",")];
  for (let i = 0; i < seqs.patient.length; i++) {
    lines.push(`${seqs.patient[i]},${seqs.seq[i]},${seqs.duration[i]}`);
  }
  await writeFile(path, lines.join("\n") + "\n", "utf-8");
}

// --- dbmart CSV ---

export async function writeDbmartCsv(
  path: string,
  rows: DbMartRow[],
): Promise<void> {
  const csv = Papa.unparse({
    fields: ["patient_num", "start_date", "phenx"],
    data: rows.map((row) => [row.patient, row.date, row.phenx]),
  });
  await writeFile(path, csv + "\n", "utf-8");
}

// --- labeled query/translate output ---

export async function readLabeledCsv(path: string): Promise<LabeledSequence[]> {
  const rows = parseCsv(await readFile(path, "utf-8"), LABELED_COLUMNS);
  return rows.map(([patient, startPhenx, endPhenx, durationDays]) => ({
    patient,
    startPhenx,
    endPhenx,
    durationDays: Number(durationDays),
  }));
}

// --- lookup TSVs (label<TAB>id, dense ids, no header) ---

function parseLookupTsv(
  text: string,
  toId: Map<string, number>,
  toLabel: string[],
): void {
  for (const line of text.split("\n")) {
    if (line === "") continue;
    // labels may themselves contain tabs; the id is after the last one
    const cut = line.lastIndexOf("\t");
    if (cut < 0) throw new DataError(`malformed lookup line: ${line}`);
    const label = line.slice(0, cut);
    const id = Number(line.slice(cut + 1));
    toId.set(label, id);
    toLabel[id] = label;
  }
}

export async function readLookups(dir: string): Promise<Lookups> {
  const lookups: Lookups = {
    phenxToId: new Map(),
    idToPhenx: [],
    patientToId: new Map(),
    idToPatient: [],
  };
  parseLookupTsv(
    await readFile(join(dir, "phenx_lookup.tsv"), "utf-8"),
    lookups.phenxToId,
    lookups.idToPhenx,
  );
  parseLookupTsv(
    await readFile(join(dir, "patient_lookup.tsv"), "utf-8"),
    lookups.patientToId,
    lookups.idToPatient,
  );
  return lookups;
}

export async function writeLookups(dir: string, lookups: Lookups): Promise<void> {
  const render = (labels: string[]) =>
    labels.map((label, id) => `${label}\t${id}`).join("\n") +
    (labels.length ? "\n" : "");
  await writeFile(join(dir, "phenx_lookup.tsv"), render(lookups.idToPhenx), "utf-8");
  await writeFile(
    join(dir, "patient_lookup.tsv"),
    render(lookups.idToPatient),
    "utf-8",
  );
}

// --- .tseq binary records and the mining manifest ---

/** Decode packed 12-byte records; the patient id lives in the manifest. */
export function readTseqRecords(buf: Buffer): {
  seq: BigUint64Array;
  duration: Uint32Array;
} {
  if (buf.length % TSEQ_RECORD_BYTES !== 0) {
    throw new DataError(
      `.tseq payload of ${buf.length} bytes is not a whole number of records`,
    );
  }
  const count = buf.length / TSEQ_RECORD_BYTES;
  const seq = new BigUint64Array(count);
  const duration = new Uint32Array(count);
  for (let i = 0; i < count; i++) {
    const offset = i * TSEQ_RECORD_BYTES;
    seq[i] = buf.readBigUInt64LE(offset);
    duration[i] = buf.readUInt32LE(offset + 8);
  }
  return { seq, duration };
}

export function writeTseqRecords(
  seq: BigUint64Array,
  duration: Uint32Array,
): Buffer {
  const buf = Buffer.alloc(seq.length * TSEQ_RECORD_BYTES);
  for (let i = 0; i < seq.length; i++) {
    const offset = i * TSEQ_RECORD_BYTES;
    buf.writeBigUInt64LE(seq[i], offset);
    buf.writeUInt32LE(duration[i], offset + 8);
  }
  return buf;
}

export async function readManifest(path: string): Promise<ManifestEntry[]> {
  const entries: ManifestEntry[] = [];
  for (const line of (await readFile(path, "utf-8")).split("\n")) {
    if (line === "") continue;
    const parts = line.split("\t");
    if (parts.length !== 3) {
      throw new DataError(`malformed manifest line: ${line}`);
    }
    entries.push({
      patient: Number(parts[0]),
      file: parts[1],
      count: Number(parts[2]),
    });
  }
  return entries;
}

/**
 * Load a file-based mining directory into one columnar result.
 * Files are (seq, duration)-sorted and the manifest ascends by patient,
 * so the result is canonically ordered.
 */
export async function readMinedDir(dir: string): Promise<ColumnarSequences> {
  const manifest = await readManifest(join(dir, "manifest.tsv"));
  const total = manifest.reduce((sum, entry) => sum + entry.count, 0);
  if (total === 0) return emptySequences();
  const seqs = allocSequences(total);
  let cursor = 0;
  for (const entry of manifest) {
    const { seq, duration } = readTseqRecords(
      await readFile(join(dir, entry.file)),
    );
    if (seq.length !== entry.count) {
      throw new DataError(
        `${entry.file} holds ${seq.length} records, manifest says ${entry.count}`,
      );
    }
    seqs.patient.fill(entry.patient, cursor, cursor + entry.count);
    seqs.seq.set(seq, cursor);
    seqs.duration.set(duration, cursor);
    cursor += entry.count;
  }
  return seqs;
}

// --- chunk plan TSV ---

const PLAN_HEADER =
  "chunk\tfirst_patient\tlast_patient\tpatients\tpredicted_sequences";

export function parsePlanTsv(text: string): ChunkPlanRow[] {
  const lines = text.split("\n").filter((line) => line !== "");
  if (lines[0] !== PLAN_HEADER) {
    throw new DataError(`unexpected plan header: ${lines[0] ?? "<empty>"}`);
  }
  return lines.slice(1).map((line) => {
    const cells = line.split("\t").map(Number);
    if (cells.length !== 5 || cells.some(Number.isNaN)) {
      throw new DataError(`malformed plan line: ${line}`);
    }
    return {
      chunk: cells[0],
      firstPatient: cells[1],
      lastPatient: cells[2],
      patients: cells[3],
      predictedSequences: cells[4],
    };
  });
}
