"""Integer encodings for event pairs and their durations.

A mined pair of phenX ids is stored as one unsigned 64-bit integer: the end id
is zero-padded to seven decimal digits and appended to the start id, so
``seq = start * 10**7 + end``. Both directions are exact integer arithmetic,
which keeps the ids human-readable in decimal form and cheap to compare.
Durations are whole days; a duration bucket can additionally be packed onto
the low bits of a sequence id for duration-aware counting.

Scalar functions validate their arguments; the ``*_array`` variants operate on
numpy arrays that are assumed valid (ids are range-checked once, when the
lookup tables are built).
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DecodingOutOfRange, EncodingOverflow, PackOverflow

#: Exclusive upper bound for a phenX id: it must fit in seven decimal digits.
PHENX_LIMIT = 10_000_000

#: Exclusive upper bound for a sequence id (two seven-digit ids).
SEQUENCE_LIMIT = PHENX_LIMIT * PHENX_LIMIT

#: Patient id reserved for marking records during sparsity screening.
PATIENT_SENTINEL = 2**32 - 1

#: Widest allowed duration bucket. 10**14 < 2**47, so 16 shifted bits keep
#: every packed value below 2**63.
MAX_BUCKET_BITS = 16

#: Default bucket width used by duration-aware screening.
DEFAULT_BUCKET_BITS = 8


class DurationUnit(enum.Enum):
    """Units a day count can be floor-converted into."""

    DAYS = 1
    WEEKS = 7
    MONTHS = 30
    YEARS = 365

    @property
    def divisor(self) -> int:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "DurationUnit":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(
                f"unknown duration unit {name!r}; expected one of "
                f"{[u.name.lower() for u in cls]}"
            ) from None


def encode_sequence(start: int, end: int) -> int:
    """Combine two phenX ids into one sequence id.

    Raises EncodingOverflow if either id needs more than seven digits.
    """
    if not 0 <= start < PHENX_LIMIT or not 0 <= end < PHENX_LIMIT:
        raise EncodingOverflow(
            f"phenX ids must lie in [0, {PHENX_LIMIT}); got ({start}, {end})"
        )
    return start * PHENX_LIMIT + end


def decode_sequence(seq: int) -> tuple[int, int]:
    """Split a sequence id back into its (start, end) phenX ids."""
    if not 0 <= seq < SEQUENCE_LIMIT:
        raise DecodingOutOfRange(
            f"sequence id must lie in [0, {SEQUENCE_LIMIT}); got {seq}"
        )
    return seq // PHENX_LIMIT, seq % PHENX_LIMIT


def encode_sequence_array(start: np.ndarray, end: np.ndarray) -> np.ndarray:
    """Vectorised encode over arrays of already-validated phenX ids."""
    return start.astype(np.uint64) * np.uint64(PHENX_LIMIT) + end.astype(np.uint64)


def decode_start_array(seq: np.ndarray) -> np.ndarray:
    """Start phenX ids of an array of sequence ids."""
    return (seq // np.uint64(PHENX_LIMIT)).astype(np.uint32)


def decode_end_array(seq: np.ndarray) -> np.ndarray:
    """End phenX ids of an array of sequence ids."""
    return (seq % np.uint64(PHENX_LIMIT)).astype(np.uint32)


def pack_duration(seq: int, bucket: int, bucket_bits: int = DEFAULT_BUCKET_BITS) -> int:
    """Shift a duration bucket onto the low bits of a sequence id.

    The bucket saturates at ``2**bucket_bits - 1``; the sequence id is
    recoverable exactly, the bucket only when it was in range.
    """
    if not 1 <= bucket_bits <= MAX_BUCKET_BITS:
        raise PackOverflow(
            f"bucket width must be 1..{MAX_BUCKET_BITS} bits, got {bucket_bits}"
        )
    cap = (1 << bucket_bits) - 1
    return (seq << bucket_bits) | min(bucket, cap)


def unpack_duration(packed: int, bucket_bits: int = DEFAULT_BUCKET_BITS) -> tuple[int, int]:
    """Inverse of :func:`pack_duration`: returns (sequence id, bucket)."""
    if not 1 <= bucket_bits <= MAX_BUCKET_BITS:
        raise PackOverflow(
            f"bucket width must be 1..{MAX_BUCKET_BITS} bits, got {bucket_bits}"
        )
    return packed >> bucket_bits, packed & ((1 << bucket_bits) - 1)


def pack_duration_array(
    seq: np.ndarray, bucket: np.ndarray, bucket_bits: int = DEFAULT_BUCKET_BITS
) -> np.ndarray:
    """Vectorised :func:`pack_duration` over uint64 sequence ids."""
    if not 1 <= bucket_bits <= MAX_BUCKET_BITS:
        raise PackOverflow(
            f"bucket width must be 1..{MAX_BUCKET_BITS} bits, got {bucket_bits}"
        )
    cap = np.uint64((1 << bucket_bits) - 1)
    clipped = np.minimum(bucket.astype(np.uint64), cap)
    return (seq.astype(np.uint64) << np.uint64(bucket_bits)) | clipped


def duration_in_unit(days: int, unit: DurationUnit) -> int:
    """Floor-convert a day count into the given unit."""
    return days // unit.divisor


def duration_in_unit_array(days: np.ndarray, unit: DurationUnit) -> np.ndarray:
    """Vectorised :func:`duration_in_unit`."""
    return days // np.uint32(unit.divisor)
