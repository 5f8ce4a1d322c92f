"""Deterministic synthetic event-table generator for tests and benchmarks.

Per-patient entry counts are Poisson around the configured mean, clamped to
at least 1; dates are uniform over the span and codes uniform over the pool.
Everything derives from one seeded generator, so equal configs give byte-equal
output. Labels are human-shaped (P0001, code_0042) so generated tables also
exercise the ingestion path.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass

import numpy as np

from .encoding import PHENX_LIMIT
from .ingestion import LookupTables
from .model import DbMartEntry

_EPOCH = datetime.date(2019, 1, 1)


@dataclass(frozen=True)
class SynthConfig:
    patients: int = 100
    avg_entries: int = 50
    distinct_phenx: int = 200
    date_span_days: int = 730
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("patients", "avg_entries", "distinct_phenx", "date_span_days"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.distinct_phenx >= PHENX_LIMIT:
            raise ValueError(f"distinct_phenx must be below {PHENX_LIMIT}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


def generate(config: SynthConfig) -> tuple[list[DbMartEntry], LookupTables]:
    """Synthesize labeled entries plus the lookup tables that intern them.

    Entries come out grouped by patient with dates unsorted within a patient,
    like a raw extract; mining is expected to sort.
    """
    rng = np.random.default_rng(config.seed)
    counts = np.maximum(rng.poisson(config.avg_entries, size=config.patients), 1)
    total = int(counts.sum())
    day_offsets = rng.integers(0, config.date_span_days, size=total)
    codes = rng.integers(0, config.distinct_phenx, size=total)

    lookups = LookupTables()
    entries: list[DbMartEntry] = []
    pos = 0
    for p in range(config.patients):
        patient_id = lookups.intern_patient(f"P{p:05d}")
        for k in range(int(counts[p])):
            phenx_id = lookups.intern_phenx(f"code_{int(codes[pos + k]):05d}")
            date = _EPOCH + datetime.timedelta(days=int(day_offsets[pos + k]))
            entries.append(DbMartEntry(patient_id, date, phenx_id))
        pos += int(counts[p])
    return entries, lookups


def generate_rows(config: SynthConfig) -> list[tuple[str, str, str]]:
    """Raw labeled rows (patient_num, start_date, phenx), ingestion-ready."""
    entries, lookups = generate(config)
    return [
        (
            lookups.patient_label(e.patient),
            e.date.isoformat(),
            lookups.phenx_label(e.phenx),
        )
        for e in entries
    ]
