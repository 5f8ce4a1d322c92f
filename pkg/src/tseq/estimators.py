"""Estimator-style wrappers around the mining and screening engine.

These follow the fit/transform convention so the pipeline drops into existing
ML tooling: the miner's fit learns the label vocabulary (lookup tables), its
transform mines sequences; the screener's transform drops sparse sequences.
All algorithmic behavior lives in the underlying modules; these classes only
validate shapes and convert between frames and columnar arrays.
"""

from __future__ import annotations

import datetime

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .encoding import SEQUENCE_LIMIT, DurationUnit
from .errors import MalformedDate, MissingColumn
from .ingestion import REQUIRED_COLUMNS, LookupTables, first_occurrence_filter
from .mining import MinerConfig, mine_all, sort_dbmart
from .model import Dbmart, SequenceArray
from .screening import SparsityConfig, sparsity_screen

SEQUENCE_COLUMNS = ("patient_num", "sequence", "duration_days")


def check_dbmart_rows(X) -> list[tuple[str, str, str]]:
    """Coerce a raw event table to (patient, date, phenx) string triples.

    Accepts a DataFrame with the dbmart columns or any iterable of
    three-element rows. Raises MissingColumn when a required column is absent.
    """
    if isinstance(X, pd.DataFrame):
        for column in REQUIRED_COLUMNS:
            if column not in X.columns:
                raise MissingColumn(column)
        return [
            (str(p), str(d), str(x))
            for p, d, x in zip(
                X["patient_num"], X["start_date"], X["phenx"]
            )
        ]
    rows = []
    for row in X:
        if len(row) != 3:
            raise MissingColumn("expected exactly (patient_num, start_date, phenx)")
        rows.append((str(row[0]), str(row[1]), str(row[2])))
    return rows


def check_sequence_input(X) -> SequenceArray:
    """Coerce mined-sequence input to a SequenceArray.

    Accepts a SequenceArray or a DataFrame with the numeric sequence columns.
    """
    if isinstance(X, SequenceArray):
        return X
    if isinstance(X, pd.DataFrame):
        for column in SEQUENCE_COLUMNS:
            if column not in X.columns:
                raise MissingColumn(column)
        seq = np.asarray(X["sequence"], dtype=np.uint64)
        if len(seq) and int(seq.max()) >= SEQUENCE_LIMIT:
            raise ValueError("sequence column contains out-of-range ids")
        return SequenceArray(
            np.asarray(X["patient_num"], dtype=np.uint32),
            seq,
            np.asarray(X["duration_days"], dtype=np.uint32),
        )
    raise TypeError("expected a SequenceArray or a sequences DataFrame")


def sequence_frame(seqs: SequenceArray) -> pd.DataFrame:
    """Numeric sequences as a DataFrame (patient_num, sequence, duration_days)."""
    return pd.DataFrame(
        {
            "patient_num": seqs.patient,
            "sequence": seqs.seq,
            "duration_days": seqs.duration,
        }
    )


class TransitiveSequenceMiner(BaseEstimator, TransformerMixin):
    """Mine all transitive temporal sequences from a raw event table.

    Parameters
    ----------
    workers : int or 'auto' (default='auto')
        Mining worker count; output is identical for any value.
    include_same_date_pairs : bool (default=True)
        Emit duration-0 pairs for events sharing a date.
    first_occurrence_only : bool (default=False)
        Keep only the earliest event per (patient, phenX) before mining.

    Attributes
    ----------
    lookups_ : LookupTables
        Vocabulary learned during fit; transform rejects labels outside it.
    n_patients_, n_phenx_ : int
        Vocabulary sizes.
    """

    def __init__(
        self,
        workers: int | str = "auto",
        include_same_date_pairs: bool = True,
        first_occurrence_only: bool = False,
    ):
        self.workers = workers
        self.include_same_date_pairs = include_same_date_pairs
        self.first_occurrence_only = first_occurrence_only

    def fit(self, X, y=None):
        rows = check_dbmart_rows(X)
        lookups = LookupTables()
        for patient, _, phenx in rows:
            lookups.intern_patient(patient)
            lookups.intern_phenx(phenx)
        self.lookups_ = lookups
        self.n_patients_ = len(lookups.id_to_patient)
        self.n_phenx_ = len(lookups.id_to_phenx)
        return self

    def transform(self, X) -> pd.DataFrame:
        check_is_fitted(self, "lookups_")
        rows = check_dbmart_rows(X)
        patient = np.empty(len(rows), dtype=np.uint32)
        day = np.empty(len(rows), dtype=np.int32)
        phenx = np.empty(len(rows), dtype=np.uint32)
        for i, (p, d, x) in enumerate(rows):
            patient[i] = self.lookups_.patient_id(p)
            phenx[i] = self.lookups_.phenx_id(x)
            try:
                day[i] = datetime.date.fromisoformat(d).toordinal()
            except ValueError:
                raise MalformedDate(i + 1, d) from None
        dbmart = Dbmart(patient, day, phenx)
        if self.first_occurrence_only:
            dbmart = first_occurrence_filter(dbmart)
        config = MinerConfig(
            workers=self.workers,
            include_same_date_pairs=self.include_same_date_pairs,
        )
        mined = mine_all(sort_dbmart(dbmart), config)
        return sequence_frame(mined)


class SparsityScreener(BaseEstimator, TransformerMixin):
    """Drop sequences that occur too rarely to be informative.

    Parameters
    ----------
    threshold : int (default=2)
        Minimum count for a sequence to survive.
    count_mode : {'occurrences', 'distinct_patients'}
    duration_aware : bool (default=False)
        Count (sequence, duration bucket) tuples instead of bare sequences.
    bucket_unit : str (default='months')
    bucket_bits : int (default=8)

    Attributes
    ----------
    config_ : SparsityConfig
    n_input_records_, n_kept_records_ : int
    """

    def __init__(
        self,
        threshold: int = 2,
        count_mode: str = "occurrences",
        duration_aware: bool = False,
        bucket_unit: str = "months",
        bucket_bits: int = 8,
    ):
        self.threshold = threshold
        self.count_mode = count_mode
        self.duration_aware = duration_aware
        self.bucket_unit = bucket_unit
        self.bucket_bits = bucket_bits

    def fit(self, X, y=None):
        self.config_ = SparsityConfig(
            threshold=self.threshold,
            count_mode=self.count_mode,
            duration_aware=self.duration_aware,
            bucket_unit=DurationUnit.from_name(self.bucket_unit),
            bucket_bits=self.bucket_bits,
        )
        self.n_input_records_ = len(check_sequence_input(X))
        return self

    def transform(self, X) -> pd.DataFrame:
        check_is_fitted(self, "config_")
        kept = sparsity_screen(check_sequence_input(X), self.config_)
        self.n_kept_records_ = len(kept)
        return sequence_frame(kept)
