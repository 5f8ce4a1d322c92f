"""Adaptive partitioning of an event table under a sequence-count budget.

Mining cost is quadratic per patient (n*(n-1)/2 records), so partitions are
planned against predicted record counts, not entry counts. Patients are packed
greedily, in sorted order, into contiguous chunks whose predicted totals stay
within the limit; chunk boundaries fall only between patients, so mining the
chunks separately and concatenating equals mining everything at once.

The default limit of 2**31 - 1 records matches the element cap of common
scripting-environment vectors, the binding constraint when mined output is
exported there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import ArithmeticOverflow, PatientExceedsLimit
from .mining import pair_count, patient_blocks
from .model import Dbmart

DEFAULT_CHUNK_LIMIT = 2**31 - 1

_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class ChunkPlan:
    """Contiguous patient partitions, each under the record limit.

    ``chunk_bounds[c] = (lo, hi)`` indexes half-open ranges of
    ``patient_ids``; ``predicted_counts[c]`` is the exact record count chunk
    ``c`` will mine.
    """

    patient_ids: np.ndarray
    chunk_bounds: list[tuple[int, int]]
    predicted_counts: list[int]
    limit: int

    def __len__(self) -> int:
        return len(self.chunk_bounds)

    def to_tsv(self) -> str:
        lines = ["chunk\tfirst_patient\tlast_patient\tpatients\tpredicted_sequences"]
        for c, ((lo, hi), count) in enumerate(
            zip(self.chunk_bounds, self.predicted_counts)
        ):
            first = int(self.patient_ids[lo]) if hi > lo else -1
            last = int(self.patient_ids[hi - 1]) if hi > lo else -1
            lines.append(f"{c}\t{first}\t{last}\t{hi - lo}\t{count}")
        return "\n".join(lines) + "\n"


def estimate_sequence_count(entries_per_patient: Sequence[int]) -> int:
    """Total records a mine of these per-patient entry counts will produce."""
    total = 0
    for n in entries_per_patient:
        total += pair_count(int(n))
        if total > _U64_MAX:
            raise ArithmeticOverflow(
                "predicted sequence count exceeds the unsigned 64-bit range"
            )
    return total


def plan_chunks(
    entries_per_patient: Sequence[int],
    limit: int = DEFAULT_CHUNK_LIMIT,
    patient_ids: Sequence[int] | None = None,
) -> ChunkPlan:
    """Greedy contiguous packing of patients under a predicted-record limit.

    A new chunk starts whenever adding the next patient would push the current
    chunk past the limit. Raises PatientExceedsLimit when one patient alone is
    over budget, naming the patient.
    """
    if patient_ids is None:
        ids = np.arange(len(entries_per_patient), dtype=np.uint32)
    else:
        ids = np.asarray(patient_ids, dtype=np.uint32)
        if len(ids) != len(entries_per_patient):
            raise ValueError("patient_ids and entries_per_patient lengths differ")

    bounds: list[tuple[int, int]] = []
    counts: list[int] = []
    start = 0
    acc = 0
    for i, n in enumerate(entries_per_patient):
        c = pair_count(int(n))
        if c > limit:
            raise PatientExceedsLimit(int(ids[i]), c, limit)
        if acc + c > limit and i > start:
            bounds.append((start, i))
            counts.append(acc)
            start, acc = i, 0
        acc += c
        if acc > _U64_MAX:
            raise ArithmeticOverflow(
                "predicted sequence count exceeds the unsigned 64-bit range"
            )
    if len(entries_per_patient):
        bounds.append((start, len(entries_per_patient)))
        counts.append(acc)
    return ChunkPlan(ids, bounds, counts, limit)


def plan_for_dbmart(dbmart: Dbmart, limit: int = DEFAULT_CHUNK_LIMIT) -> ChunkPlan:
    """Chunk plan for a patient-major sorted event table."""
    ids, block_bounds = patient_blocks(dbmart)
    entries = np.diff(block_bounds)
    return plan_chunks(entries, limit, ids)


def iter_chunks(dbmart: Dbmart, plan: ChunkPlan) -> Iterator[Dbmart]:
    """Per-chunk contiguous slices of a sorted event table."""
    _, block_bounds = patient_blocks(dbmart)
    for lo, hi in plan.chunk_bounds:
        yield Dbmart(
            dbmart.patient[block_bounds[lo] : block_bounds[hi]],
            dbmart.day[block_bounds[lo] : block_bounds[hi]],
            dbmart.phenx[block_bounds[lo] : block_bounds[hi]],
        )
