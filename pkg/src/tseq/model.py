"""Columnar containers for patient event tables and mined sequences.

The engine works on parallel numpy arrays throughout: an event table
(:class:`Dbmart`) holds patient id, event day and phenX id columns, and mined
output (:class:`SequenceArray`) holds patient id, sequence id and duration
columns. Row-level views (:class:`DbMartEntry`, :class:`TemporalSequence`) are
provided for tests and small-scale inspection; the columnar form is the one
every operation consumes and produces.

Dates are stored as proleptic Gregorian ordinals (``datetime.date.toordinal``)
so durations are plain integer differences.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .encoding import decode_end_array, decode_start_array

SEQUENCE_RECORD_DTYPE = np.dtype(
    [("patient", "<u4"), ("seq", "<u8"), ("duration", "<u4")]
)


@dataclass(frozen=True)
class DbMartEntry:
    """One numeric patient event: who, when, what."""

    patient: int
    date: datetime.date
    phenx: int


class TemporalSequence(NamedTuple):
    """One mined pair: patient, encoded sequence id, duration in days."""

    patient: int
    seq: int
    duration: int


@dataclass(frozen=True)
class Dbmart:
    """Event table as three equal-length columns.

    ``patient`` and ``phenx`` are dense uint32 ids assigned at ingestion;
    ``day`` is the event date as a Gregorian ordinal (int32).
    """

    patient: np.ndarray
    day: np.ndarray
    phenx: np.ndarray

    def __post_init__(self):
        if not (len(self.patient) == len(self.day) == len(self.phenx)):
            raise ValueError("dbmart columns must have equal lengths")

    def __len__(self) -> int:
        return len(self.patient)

    @classmethod
    def empty(cls) -> "Dbmart":
        return cls(
            np.empty(0, np.uint32), np.empty(0, np.int32), np.empty(0, np.uint32)
        )

    @classmethod
    def from_entries(cls, entries: list[DbMartEntry]) -> "Dbmart":
        return cls(
            np.array([e.patient for e in entries], np.uint32),
            np.array([e.date.toordinal() for e in entries], np.int32),
            np.array([e.phenx for e in entries], np.uint32),
        )

    def entries(self) -> Iterator[DbMartEntry]:
        for p, d, x in zip(self.patient, self.day, self.phenx):
            yield DbMartEntry(int(p), datetime.date.fromordinal(int(d)), int(x))

    def take(self, index: np.ndarray) -> "Dbmart":
        return Dbmart(self.patient[index], self.day[index], self.phenx[index])


class SequenceArray:
    """Mined sequences as three equal-length columns.

    ``patient`` uint32, ``seq`` uint64, ``duration`` uint32. Canonical order
    is (patient, seq, duration) ascending; mining returns canonical output and
    most other operations preserve the relative order they receive.
    """

    __slots__ = ("patient", "seq", "duration")

    def __init__(self, patient: np.ndarray, seq: np.ndarray, duration: np.ndarray):
        if not (len(patient) == len(seq) == len(duration)):
            raise ValueError("sequence columns must have equal lengths")
        self.patient = np.ascontiguousarray(patient, np.uint32)
        self.seq = np.ascontiguousarray(seq, np.uint64)
        self.duration = np.ascontiguousarray(duration, np.uint32)

    def __len__(self) -> int:
        return len(self.patient)

    def __repr__(self) -> str:
        return f"SequenceArray({len(self)} records)"

    @classmethod
    def empty(cls) -> "SequenceArray":
        return cls(np.empty(0, np.uint32), np.empty(0, np.uint64), np.empty(0, np.uint32))

    @classmethod
    def concat(cls, parts: list["SequenceArray"]) -> "SequenceArray":
        if not parts:
            return cls.empty()
        return cls(
            np.concatenate([p.patient for p in parts]),
            np.concatenate([p.seq for p in parts]),
            np.concatenate([p.duration for p in parts]),
        )

    def take(self, index: np.ndarray) -> "SequenceArray":
        return SequenceArray(self.patient[index], self.seq[index], self.duration[index])

    def starts(self) -> np.ndarray:
        """Decoded start phenX id per record."""
        return decode_start_array(self.seq)

    def ends(self) -> np.ndarray:
        """Decoded end phenX id per record."""
        return decode_end_array(self.seq)

    def canonical_order(self) -> np.ndarray:
        """Index that sorts records by (patient, seq, duration)."""
        return np.lexsort((self.duration, self.seq, self.patient))

    def canonical_sort(self) -> "SequenceArray":
        """Records sorted by (patient, seq, duration)."""
        return self.take(self.canonical_order())

    def to_structured(self) -> np.ndarray:
        """Packed little-endian (patient, seq, duration) record array."""
        out = np.empty(len(self), SEQUENCE_RECORD_DTYPE)
        out["patient"] = self.patient
        out["seq"] = self.seq
        out["duration"] = self.duration
        return out

    def tobytes(self) -> bytes:
        """Byte image of the structured record form; used for identity checks."""
        return self.to_structured().tobytes()

    def records(self) -> Iterator[TemporalSequence]:
        for p, s, d in zip(self.patient, self.seq, self.duration):
            yield TemporalSequence(int(p), int(s), int(d))

    @classmethod
    def from_records(cls, records: list[TemporalSequence]) -> "SequenceArray":
        return cls(
            np.array([r.patient for r in records], np.uint32),
            np.array([r.seq for r in records], np.uint64),
            np.array([r.duration for r in records], np.uint32),
        )
