"""Shared fixtures and independent oracles for the test suite.

The helpers here deliberately avoid the engine's own fast paths: counting is
done with dicts and Counters, encoding with string concatenation, statistics
with brute-force contingency tables. Tests compare the engine against these.
"""

from __future__ import annotations

import datetime
import math
from collections import Counter

import numpy as np

from tseq import (
    MinerConfig,
    SequenceArray,
    mine_all,
    parse_dbmart_text,
    sort_dbmart,
)

RawRow = tuple[str, str, str]


def make_rows(
    rng: np.random.Generator,
    patients: int,
    max_entries: int,
    distinct_codes: int = 25,
    span_days: int = 400,
    min_entries: int = 0,
) -> list[RawRow]:
    """Random raw dbmart rows, grouped by patient, dates unsorted."""
    rows: list[RawRow] = []
    base = datetime.date(2020, 1, 1)
    for p in range(patients):
        n = int(rng.integers(min_entries, max_entries + 1))
        for _ in range(n):
            day = base + datetime.timedelta(days=int(rng.integers(0, span_days)))
            code = f"c{int(rng.integers(0, distinct_codes)):03d}"
            rows.append((f"P{p:04d}", day.isoformat(), code))
    return rows


def rows_to_csv(rows: list[RawRow]) -> str:
    lines = ["patient_num,start_date,phenx"]
    lines += [",".join(row) for row in rows]
    return "\n".join(lines) + "\n"


def mine_rows(rows: list[RawRow], **config) -> tuple[SequenceArray, "object"]:
    """Parse, sort, and mine raw rows; returns (sequences, lookups)."""
    dbmart, lookups = parse_dbmart_text(rows_to_csv(rows))
    mined = mine_all(sort_dbmart(dbmart), MinerConfig(**config))
    return mined, lookups


def str_encode(start: int, end: int) -> int:
    """Digit-concatenation oracle for the sequence id: start then 7-digit end."""
    return int(f"{start}{end:07d}")


def str_decode(seq: int) -> tuple[int, int]:
    text = f"{seq:08d}"
    return int(text[:-7] or "0"), int(text[-7:])


def multiset(seqs: SequenceArray) -> Counter:
    return Counter(
        zip(seqs.patient.tolist(), seqs.seq.tolist(), seqs.duration.tolist())
    )


def naive_multiset(rows: list[tuple[str, str, str, int]], lookups) -> Counter:
    """Encode oracle rows (patient, start, end, days) with the given lookups."""
    return Counter(
        (
            lookups.patient_id(p),
            str_encode(lookups.phenx_id(s), lookups.phenx_id(e)),
            d,
        )
        for p, s, e, d in rows
    )


def phi_oracle(x: list[bool], y: list[bool]) -> float:
    """Brute-force phi: Pearson correlation of two binary vectors."""
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    cov = sum((xi - mx) * (yi - my) for xi, yi in zip(x, y))
    vx = sum((xi - mx) ** 2 for xi in x)
    vy = sum((yi - my) ** 2 for yi in y)
    if vx == 0 or vy == 0:
        return 0.0
    return cov / math.sqrt(vx * vy)


def chi2_p_oracle(phi: float, n: int) -> float:
    """Survival function of chi-square(df=1) at n*phi^2, via the error function."""
    return math.erfc(math.sqrt(n * phi * phi / 2))


def count_oracle(seqs: SequenceArray, mode: str, bucketer=None) -> Counter:
    """Recount sequence keys with plain dicts (independent of screening)."""
    pairs = []
    for p, s, d in zip(
        seqs.patient.tolist(), seqs.seq.tolist(), seqs.duration.tolist()
    ):
        key = (s, bucketer(d)) if bucketer else s
        pairs.append((p, key))
    if mode == "occurrences":
        return Counter(key for _, key in pairs)
    # distinct_patients: each (patient, key) pair contributes once
    return Counter(key for _, key in set(pairs))
