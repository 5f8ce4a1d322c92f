"""Sparsity screening: drop sequences that occur fewer times than a threshold.

The screen follows a sort-based procedure rather than hash counting: records
are sorted by their counting key, per-key run boundaries give the counts,
condemned records get the reserved sentinel patient id, a second sort by
patient id pushes all condemned records to the tail, and one truncation
removes them. Marking happens in place, so the input array is consumed;
surviving records are returned in their original relative order.

The counting key is the sequence id, or, for duration-aware screening, the
sequence id with the duration bucket packed onto its low bits so the same
event pair at different time scales counts separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import (
    DEFAULT_BUCKET_BITS,
    PATIENT_SENTINEL,
    DurationUnit,
    duration_in_unit_array,
    pack_duration_array,
)
from .model import SequenceArray

COUNT_MODES = ("occurrences", "distinct_patients")


@dataclass
class SparsityConfig:
    """Screening parameters.

    ``threshold`` is the minimum count a key needs to survive. ``count_mode``
    counts either raw record occurrences or distinct patients per key.
    """

    threshold: int
    count_mode: str = "occurrences"
    duration_aware: bool = False
    bucket_unit: DurationUnit = DurationUnit.MONTHS
    bucket_bits: int = DEFAULT_BUCKET_BITS

    def __post_init__(self):
        if self.threshold < 1:
            raise ValueError("sparsity threshold must be >= 1")
        if self.count_mode not in COUNT_MODES:
            raise ValueError(
                f"count_mode must be one of {COUNT_MODES}, got {self.count_mode!r}"
            )


def _counting_key(seqs: SequenceArray, config: SparsityConfig) -> np.ndarray:
    if not config.duration_aware:
        return seqs.seq
    buckets = duration_in_unit_array(seqs.duration, config.bucket_unit)
    return pack_duration_array(seqs.seq, buckets, config.bucket_bits)


def _screen(seqs: SequenceArray, key: np.ndarray, config: SparsityConfig) -> SequenceArray:
    n = len(seqs)
    if n == 0:
        return SequenceArray.empty()

    if config.count_mode == "distinct_patients":
        by_key = np.lexsort((seqs.patient, key))
    else:
        by_key = np.argsort(key, kind="stable")
    key_sorted = key[by_key]

    new_key = np.ones(n, bool)
    new_key[1:] = key_sorted[1:] != key_sorted[:-1]
    run_starts = np.flatnonzero(new_key)
    run_lengths = np.diff(np.append(run_starts, n))

    if config.count_mode == "distinct_patients":
        pat_sorted = seqs.patient[by_key]
        new_pair = np.ones(n, np.int64)
        new_pair[1:] = (key_sorted[1:] != key_sorted[:-1]) | (
            pat_sorted[1:] != pat_sorted[:-1]
        )
        counts = np.add.reduceat(new_pair, run_starts)
    else:
        counts = run_lengths

    condemned_runs = counts < config.threshold
    if condemned_runs.any():
        condemned = np.repeat(condemned_runs, run_lengths)
        # in-place sentinel marking; the input array is consumed
        seqs.patient[by_key[condemned]] = np.uint32(PATIENT_SENTINEL)

    by_patient = np.argsort(seqs.patient, kind="stable")
    first_sentinel = np.searchsorted(
        seqs.patient, np.uint32(PATIENT_SENTINEL), side="left", sorter=by_patient
    )
    survivors = by_patient[:first_sentinel]
    survivors.sort()
    return seqs.take(survivors)


def sparsity_screen(seqs: SequenceArray, config: SparsityConfig) -> SequenceArray:
    """Remove records whose counting key occurs fewer than ``threshold`` times.

    Consumes the input (patient ids of condemned records are overwritten with
    the sentinel); survivors come back in their original relative order.
    """
    return _screen(seqs, _counting_key(seqs, config), config)


def duration_sparsity_screen(seqs: SequenceArray, config: SparsityConfig) -> SequenceArray:
    """Duration-aware screen: counts are per (sequence id, duration bucket)."""
    if not config.duration_aware:
        raise ValueError("duration_sparsity_screen requires duration_aware=True")
    return _screen(seqs, _counting_key(seqs, config), config)
