"""Naive baseline miner over raw string rows.

Deliberately obvious and allocation-heavy: label pairs, Python loops, no
numeric conversion, no parallelism. Every pair builds its own record and
recomputes the duration from the raw date strings, the repeated work the
engine's up-front numeric conversion removes. Exists only as the correctness
oracle and the wall-time comparison baseline; never use it on real data
sizes.
"""

from __future__ import annotations

import datetime
import itertools
from collections import Counter
from typing import Iterable, Sequence

NaiveRow = tuple[str, str, str, int]


def _create_sequence(x: Sequence[str], y: Sequence[str]) -> NaiveRow:
    """One mined record from a pair of raw rows, all fields derived here."""
    record = {
        "patient": x[0],
        "sequence": x[2] + "->" + y[2],
        "start": x[2],
        "end": y[2],
        "duration": (
            datetime.date.fromisoformat(y[1]) - datetime.date.fromisoformat(x[1])
        ).days,
    }
    return record["patient"], record["start"], record["end"], record["duration"]


def naive_mine(rows: Iterable[Sequence[str]]) -> list[NaiveRow]:
    """All i < j event pairs per patient as (patient, start, end, days) rows.

    Input rows are raw (patient_num, start_date, phenx) string triples in any
    order; a stable (patient, date) sort defines the pairing order. ISO dates
    order correctly as text, so no parsing happens before the pair loop.
    """
    ordered = sorted(rows, key=lambda row: (row[0], row[1]))
    out: list[NaiveRow] = []
    for _, group in itertools.groupby(ordered, key=lambda row: row[0]):
        events = list(group)
        for i in range(len(events)):
            for j in range(i + 1, len(events)):
                out.append(_create_sequence(events[i], events[j]))
    return out


def naive_sparsity_screen(rows: list[NaiveRow], threshold: int) -> list[NaiveRow]:
    """Keep rows whose (start, end) pair occurs at least ``threshold`` times."""
    counts = Counter((start, end) for _, start, end, _ in rows)
    return [row for row in rows if counts[(row[1], row[2])] >= threshold]
