"""Mining of all transitive event pairs, per patient, with durations.

The event table is sorted patient-major (patient id, then date) so each
patient occupies one contiguous block. Within a block every index pair
``i < j`` becomes one sequence: the encoded (phenX_i, phenX_j) pair plus the
day difference, giving exactly ``n*(n-1)/2`` sequences for a block of ``n``
entries. Blocks are mined independently, which is also the unit of
parallelism: workers fill disjoint slices of one preallocated output, so the
result is byte-identical no matter how many workers ran.

Two output modes exist: fully in memory (one :class:`SequenceArray`), or one
binary ``.tseq`` file per patient plus a ``manifest.tsv`` naming them.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import NamedTuple

import numpy as np
import psutil

from .encoding import PHENX_LIMIT
from .errors import CapacityExceeded, IoFailure
from .model import Dbmart, SequenceArray

#: On-disk record layout of a ``.tseq`` file: little-endian u64 sequence id
#: followed by u32 duration in days; the patient id lives in the file name.
TSEQ_RECORD_DTYPE = np.dtype([("seq", "<u8"), ("duration", "<u4")])

TSEQ_SUFFIX = ".tseq"
MANIFEST_FILE = "manifest.tsv"

#: In-memory cost of one mined record (u64 seq + u32 duration + u32 patient).
RECORD_BYTES = 16


@dataclass
class MinerConfig:
    """Knobs for a mining run.

    ``workers`` may be a positive integer or ``"auto"`` (one per CPU).
    ``max_records`` caps the predicted output size; when None the cap is
    derived from currently available memory at ``RECORD_BYTES`` per record.
    """

    mode: str = "in_memory"
    workers: int | str = "auto"
    output_dir: str | Path | None = None
    include_same_date_pairs: bool = True
    max_records: int | None = None

    def __post_init__(self):
        if self.mode not in ("in_memory", "file_based"):
            raise ValueError(f"unknown mining mode {self.mode!r}")
        if self.mode == "file_based" and self.output_dir is None:
            raise ValueError("file_based mode requires an output_dir")
        if self.workers != "auto" and (
            not isinstance(self.workers, int) or self.workers < 1
        ):
            raise ValueError("workers must be a positive integer or 'auto'")

    def resolved_workers(self) -> int:
        if self.workers == "auto":
            return os.cpu_count() or 1
        return self.workers


class ManifestEntry(NamedTuple):
    """One row of a file-based mining manifest."""

    patient: int
    file: str
    count: int


def pair_count(n: int) -> int:
    """Sequences mined from a block of ``n`` entries: n*(n-1)/2."""
    return n * (n - 1) // 2


def sort_dbmart(dbmart: Dbmart) -> Dbmart:
    """Stable sort by (patient, date); equal keys keep their input order."""
    n = len(dbmart)
    order = np.lexsort((np.arange(n), dbmart.day, dbmart.patient))
    return dbmart.take(order)


def is_sorted(dbmart: Dbmart) -> bool:
    p, d = dbmart.patient, dbmart.day
    if len(p) < 2:
        return True
    asc = p[1:] >= p[:-1]
    same = p[1:] == p[:-1]
    return bool(asc.all() and (d[1:][same] >= d[:-1][same]).all())


def patient_blocks(dbmart: Dbmart) -> tuple[np.ndarray, np.ndarray]:
    """(patient ids, block start offsets) of a patient-major sorted table.

    Returns ``ids`` of shape (B,) and ``bounds`` of shape (B+1,); block ``b``
    spans ``bounds[b]:bounds[b+1]``.
    """
    n = len(dbmart)
    if n == 0:
        return np.empty(0, np.uint32), np.zeros(1, np.int64)
    starts = np.flatnonzero(np.diff(dbmart.patient)) + 1
    bounds = np.concatenate(([0], starts, [n]))
    return dbmart.patient[bounds[:-1]], bounds


@lru_cache(maxsize=8)
def _pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All i<j index pairs of a block of n, in (i, j) order.

    Linear in the pair count (no n-by-n mask) and int32, since blocks are
    bounded by the chunk limit anyway. Cached arrays are shared read-only
    across workers; callers must not mutate them.
    """
    lens = np.arange(n - 1, 0, -1, dtype=np.int32)
    idx_i = np.repeat(np.arange(n - 1, dtype=np.int32), lens)
    starts = np.zeros(n - 1, np.int32)
    np.cumsum(lens[:-1], out=starts[1:])
    idx_j = np.arange(len(idx_i), dtype=np.int32) - np.repeat(starts, lens) + idx_i + 1
    return idx_i, idx_j


def _block_pairs(
    days: np.ndarray, phenx: np.ndarray, include_same_date_pairs: bool
) -> tuple[np.ndarray, np.ndarray]:
    """(seq, duration) for all i<j pairs of one date-sorted block, in i<j order."""
    n = len(days)
    if n < 2:
        return np.empty(0, np.uint64), np.empty(0, np.uint32)
    idx_i, idx_j = _pair_indices(n)
    if not include_same_date_pairs:
        later = days[idx_j] > days[idx_i]
        idx_i, idx_j = idx_i[later], idx_j[later]
    seq = phenx[idx_i].astype(np.uint64)
    seq *= np.uint64(PHENX_LIMIT)
    seq += phenx[idx_j]
    dur = (days[idx_j] - days[idx_i]).astype(np.uint32)
    return seq, dur


def mine_sequences_for_patient(block: Dbmart) -> SequenceArray:
    """All transitive sequences of one patient's date-sorted block.

    Emits one record per index pair i < j, in that order; durations are the
    day differences and never negative.
    """
    if len(block) and (block.patient != block.patient[0]).any():
        raise ValueError("block must contain entries of a single patient")
    seq, dur = _block_pairs(block.day, block.phenx, True)
    patient = np.full(len(seq), block.patient[0] if len(block) else 0, np.uint32)
    return SequenceArray(patient, seq, dur)


def _block_counts(dbmart: Dbmart, bounds: np.ndarray, include_same_date: bool) -> np.ndarray:
    """Exact record count per block for the chosen same-date policy."""
    sizes = np.diff(bounds)
    counts = sizes * (sizes - 1) // 2
    if not include_same_date and len(dbmart):
        # subtract C(r,2) for every same-(patient,date) run of length r
        p, d = dbmart.patient, dbmart.day
        same = np.zeros(len(p), bool)
        if len(p) > 1:
            same[1:] = (p[1:] == p[:-1]) & (d[1:] == d[:-1])
        run_starts = np.flatnonzero(~same)
        run_sizes = np.diff(np.append(run_starts, len(p)))
        run_pairs = run_sizes * (run_sizes - 1) // 2
        block_of_run = np.searchsorted(bounds, run_starts, side="right") - 1
        per_block = np.zeros(len(sizes), np.int64)
        np.add.at(per_block, block_of_run, run_pairs)
        counts = counts - per_block
    return counts.astype(np.int64)


def _record_budget(config: MinerConfig) -> int:
    if config.max_records is not None:
        return config.max_records
    return psutil.virtual_memory().available // RECORD_BYTES


def _work_ranges(costs: np.ndarray, workers: int) -> list[tuple[int, int]]:
    """Split blocks into ≤ workers contiguous ranges of similar total cost."""
    total = int(costs.sum())
    if total == 0 or workers <= 1:
        return [(0, len(costs))]
    target = total / workers
    ranges = []
    start, acc = 0, 0
    for i, c in enumerate(costs):
        acc += int(c)
        if acc >= target and len(ranges) < workers - 1:
            ranges.append((start, i + 1))
            start, acc = i + 1, 0
    if start < len(costs):
        ranges.append((start, len(costs)))
    return ranges


def _mine_range(
    dbmart: Dbmart,
    bounds: np.ndarray,
    offsets: np.ndarray,
    lo: int,
    hi: int,
    include_same_date: bool,
    out_patient: np.ndarray,
    out_seq: np.ndarray,
    out_dur: np.ndarray,
    ids: np.ndarray,
) -> None:
    for b in range(lo, hi):
        s, e = bounds[b], bounds[b + 1]
        seq, dur = _block_pairs(
            dbmart.day[s:e], dbmart.phenx[s:e], include_same_date
        )
        o = offsets[b]
        out_patient[o : o + len(seq)] = ids[b]
        out_seq[o : o + len(seq)] = seq
        out_dur[o : o + len(seq)] = dur


def mine_all(dbmart: Dbmart, config: MinerConfig | None = None) -> SequenceArray:
    """Mine every patient block of a sorted event table.

    Records come out grouped by patient in pair-emission (i, j) order, which
    is fully determined by the input, so the bytes are identical for any
    worker count; ``canonical_sort`` reorders by (patient, seq, duration)
    when a canonical form is needed. Raises CapacityExceeded when the
    predicted record count is beyond the memory budget; split the table with
    the chunk planner in that case.
    """
    config = config or MinerConfig()
    if not is_sorted(dbmart):
        raise ValueError("entries are not sorted patient-major; run sort_dbmart first")

    ids, bounds = patient_blocks(dbmart)
    counts = _block_counts(dbmart, bounds, config.include_same_date_pairs)
    total = int(counts.sum())
    budget = _record_budget(config)
    if total > budget:
        raise CapacityExceeded(
            f"predicted {total} sequences exceed the budget of {budget} records; "
            "mine in chunks"
        )

    offsets = np.zeros(len(counts) + 1, np.int64)
    np.cumsum(counts, out=offsets[1:])
    out_patient = np.empty(total, np.uint32)
    out_seq = np.empty(total, np.uint64)
    out_dur = np.empty(total, np.uint32)

    workers = config.resolved_workers()
    ranges = _work_ranges(counts, workers)
    if len(ranges) == 1:
        lo, hi = ranges[0]
        _mine_range(dbmart, bounds, offsets, lo, hi,
                    config.include_same_date_pairs, out_patient, out_seq, out_dur, ids)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _mine_range, dbmart, bounds, offsets, lo, hi,
                    config.include_same_date_pairs, out_patient, out_seq, out_dur, ids,
                )
                for lo, hi in ranges
            ]
            for f in futures:
                f.result()
    return SequenceArray(out_patient, out_seq, out_dur)


def write_tseq_file(path: str | Path, seq: np.ndarray, dur: np.ndarray) -> None:
    """Write (seq, duration) arrays as packed 12-byte little-endian records."""
    records = np.empty(len(seq), TSEQ_RECORD_DTYPE)
    records["seq"] = seq
    records["duration"] = dur
    with open(path, "wb") as fh:
        fh.write(records.tobytes())


def read_tseq_file(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``.tseq`` file back into (seq, duration) arrays."""
    data = Path(path).read_bytes()
    if len(data) % TSEQ_RECORD_DTYPE.itemsize:
        raise IoFailure(path, ValueError("file size is not a multiple of 12 bytes"))
    records = np.frombuffer(data, TSEQ_RECORD_DTYPE)
    return records["seq"].copy(), records["duration"].copy()


def write_manifest(path: str | Path, manifest: list[ManifestEntry]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for entry in manifest:
            fh.write(f"{entry.patient}\t{entry.file}\t{entry.count}\n")


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    manifest = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            patient, file, count = line.split("\t")
            manifest.append(ManifestEntry(int(patient), file, int(count)))
    return manifest


def mine_to_files(dbmart: Dbmart, config: MinerConfig) -> list[ManifestEntry]:
    """Mine each patient into ``<patient_id>.tseq`` under ``config.output_dir``.

    Records within a file are (seq, duration)-sorted; the manifest lists
    patient id, file name and record count in ascending patient order.
    Partially written files are removed if anything fails.
    """
    if config.mode != "file_based":
        raise ValueError("mine_to_files requires file_based mode")
    if not is_sorted(dbmart):
        raise ValueError("entries are not sorted patient-major; run sort_dbmart first")
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    ids, bounds = patient_blocks(dbmart)
    manifest: list[ManifestEntry] = []
    written: list[Path] = []

    def write_block(b: int) -> ManifestEntry:
        s, e = bounds[b], bounds[b + 1]
        seq, dur = _block_pairs(
            dbmart.day[s:e], dbmart.phenx[s:e], config.include_same_date_pairs
        )
        if len(seq):
            order = np.lexsort((dur, seq))
            seq, dur = seq[order], dur[order]
        name = f"{int(ids[b])}{TSEQ_SUFFIX}"
        path = out_dir / name
        written.append(path)
        write_tseq_file(path, seq, dur)
        return ManifestEntry(int(ids[b]), name, len(seq))

    try:
        workers = config.resolved_workers()
        if workers == 1 or len(ids) <= 1:
            manifest = [write_block(b) for b in range(len(ids))]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                manifest = list(pool.map(write_block, range(len(ids))))
    except OSError as exc:
        for path in written:
            path.unlink(missing_ok=True)
        raise IoFailure(exc.filename or config.output_dir, exc) from exc

    manifest.sort()
    write_manifest(out_dir / MANIFEST_FILE, manifest)
    return manifest


def read_mined_dir(directory: str | Path) -> SequenceArray:
    """Load a file-based mining output back into one sequence array.

    Files are (seq, duration)-sorted and the manifest ascends by patient, so
    the result is already canonically ordered; it equals the in-memory mine
    of the same table as a multiset, byte for byte after canonical_sort.
    """
    directory = Path(directory)
    manifest = read_manifest(directory / MANIFEST_FILE)
    parts = []
    for entry in manifest:
        seq, dur = read_tseq_file(directory / entry.file)
        if len(seq) != entry.count:
            raise IoFailure(
                directory / entry.file,
                ValueError(f"expected {entry.count} records, found {len(seq)}"),
            )
        patient = np.full(len(seq), entry.patient, np.uint32)
        parts.append(SequenceArray(patient, seq, dur))
    return SequenceArray.concat(parts)
