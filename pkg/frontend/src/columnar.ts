/** Construction and comparison helpers for columnar sequence data. */

import { DataError } from "./errors.js";
import type { ColumnarSequences } from "./types.js";

export function emptySequences(): ColumnarSequences {
  return {
    patient: new Uint32Array(0),
    seq: new BigUint64Array(0),
    duration: new Uint32Array(0),
  };
}

export function allocSequences(length: number): ColumnarSequences {
  return {
    patient: new Uint32Array(length),
    seq: new BigUint64Array(length),
    duration: new Uint32Array(length),
  };
}

export function sequenceCount(seqs: ColumnarSequences): number {
  const n = seqs.patient.length;
  if (seqs.seq.length !== n || seqs.duration.length !== n) {
    throw new DataError("columnar arrays have unequal lengths");
  }
  return n;
}

/** Rows as (patient, seq, duration) tuples, mostly for tests and debugging. */
export function toRecords(
  seqs: ColumnarSequences,
): Array<[number, bigint, number]> {
  const n = sequenceCount(seqs);
  const out: Array<[number, bigint, number]> = new Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = [seqs.patient[i], seqs.seq[i], seqs.duration[i]];
  }
  return out;
}

export function fromRecords(
  records: Iterable<[number, bigint, number]>,
): ColumnarSequences {
  const rows = Array.from(records);
  const seqs = allocSequences(rows.length);
  rows.forEach(([patient, seq, duration], i) => {
    seqs.patient[i] = patient;
    seqs.seq[i] = seq;
    seqs.duration[i] = duration;
  });
  return seqs;
}

/**
 * Stable sort by (patient, seq, duration), the engine's canonical order.
 * In-memory engine output arrives in pair-emission order, so comparisons
 * across interfaces go through this first.
 */
export function canonicalSort(seqs: ColumnarSequences): ColumnarSequences {
  const n = sequenceCount(seqs);
  const order = Array.from({ length: n }, (_, i) => i);
  order.sort((a, b) => {
    if (seqs.patient[a] !== seqs.patient[b]) {
      return seqs.patient[a] - seqs.patient[b];
    }
    if (seqs.seq[a] !== seqs.seq[b]) {
      return seqs.seq[a] < seqs.seq[b] ? -1 : 1;
    }
    return seqs.duration[a] - seqs.duration[b];
  });
  const sorted = allocSequences(n);
  order.forEach((src, dst) => {
    sorted.patient[dst] = seqs.patient[src];
    sorted.seq[dst] = seqs.seq[src];
    sorted.duration[dst] = seqs.duration[src];
  });
  return sorted;
}

export function sequencesEqual(
  a: ColumnarSequences,
  b: ColumnarSequences,
): boolean {
  const n = sequenceCount(a);
  if (sequenceCount(b) !== n) return false;
  for (let i = 0; i < n; i++) {
    if (
      a.patient[i] !== b.patient[i] ||
      a.seq[i] !== b.seq[i] ||
      a.duration[i] !== b.duration[i]
    ) {
      return false;
    }
  }
  return true;
}
