"""Turning raw dbmart CSVs into numeric event tables, and back.

A dbmart arrives as CSV with columns ``patient_num``, ``start_date`` and
``phenx`` (extra columns, e.g. a description, are ignored). Parsing assigns
dense numeric ids to patients and phenX codes in first-appearance order and
records the reversible mapping in :class:`LookupTables`, so everything
downstream runs on integers and can be translated back at the end.
"""

from __future__ import annotations

import csv
import datetime
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np
import pandas as pd

from .encoding import PATIENT_SENTINEL, PHENX_LIMIT
from .errors import MalformedDate, MissingColumn, PhenxOverflow, TseqError, UnknownId
from .model import Dbmart, SequenceArray

REQUIRED_COLUMNS = ("patient_num", "start_date", "phenx")

PHENX_LOOKUP_FILE = "phenx_lookup.tsv"
PATIENT_LOOKUP_FILE = "patient_lookup.tsv"


@dataclass
class LookupTables:
    """Reversible maps between original string identifiers and dense ids."""

    phenx_to_id: dict[str, int] = field(default_factory=dict)
    id_to_phenx: list[str] = field(default_factory=list)
    patient_to_id: dict[str, int] = field(default_factory=dict)
    id_to_patient: list[str] = field(default_factory=list)

    def phenx_id(self, label: str) -> int:
        """Id of an existing phenX label."""
        try:
            return self.phenx_to_id[label]
        except KeyError:
            raise UnknownId(f"phenX label {label!r} not in lookup tables") from None

    def patient_id(self, label: str) -> int:
        """Id of an existing patient label."""
        try:
            return self.patient_to_id[label]
        except KeyError:
            raise UnknownId(f"patient label {label!r} not in lookup tables") from None

    def phenx_label(self, phenx: int) -> str:
        if not 0 <= phenx < len(self.id_to_phenx):
            raise UnknownId(f"phenX id {phenx} outside lookup range")
        return self.id_to_phenx[phenx]

    def patient_label(self, patient: int) -> str:
        if not 0 <= patient < len(self.id_to_patient):
            raise UnknownId(f"patient id {patient} outside lookup range")
        return self.id_to_patient[patient]

    def intern_phenx(self, label: str) -> int:
        """Id for a phenX label, assigning the next dense id if new."""
        pid = self.phenx_to_id.get(label)
        if pid is None:
            pid = len(self.id_to_phenx)
            if pid >= PHENX_LIMIT:
                raise PhenxOverflow(
                    f"distinct phenX count reached the limit of {PHENX_LIMIT}"
                )
            self.phenx_to_id[label] = pid
            self.id_to_phenx.append(label)
        return pid

    def intern_patient(self, label: str) -> int:
        """Id for a patient label, assigning the next dense id if new."""
        pid = self.patient_to_id.get(label)
        if pid is None:
            pid = len(self.id_to_patient)
            if pid >= PATIENT_SENTINEL:
                raise TseqError("patient id space exhausted; sentinel is reserved")
            self.patient_to_id[label] = pid
            self.id_to_patient.append(label)
        return pid

    def is_bijective(self) -> bool:
        return all(
            self.id_to_phenx[i] == s for s, i in self.phenx_to_id.items()
        ) and all(
            self.id_to_patient[i] == s for s, i in self.patient_to_id.items()
        ) and len(self.phenx_to_id) == len(self.id_to_phenx) and len(
            self.patient_to_id
        ) == len(self.id_to_patient)

    def save(self, directory: str | Path) -> None:
        """Write ``phenx_lookup.tsv`` and ``patient_lookup.tsv`` (label<TAB>id)."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name, labels in (
            (PHENX_LOOKUP_FILE, self.id_to_phenx),
            (PATIENT_LOOKUP_FILE, self.id_to_patient),
        ):
            with open(directory / name, "w", encoding="utf-8", newline="") as fh:
                for i, label in enumerate(labels):
                    fh.write(f"{label}\t{i}\n")

    @classmethod
    def load(cls, directory: str | Path) -> "LookupTables":
        directory = Path(directory)
        tables = cls()
        for name, to_id, to_label in (
            (PHENX_LOOKUP_FILE, tables.phenx_to_id, tables.id_to_phenx),
            (PATIENT_LOOKUP_FILE, tables.patient_to_id, tables.id_to_patient),
        ):
            with open(directory / name, encoding="utf-8") as fh:
                for line in fh:
                    line = line.rstrip("\n")
                    if not line:
                        continue
                    label, _, num = line.rpartition("\t")
                    idx = int(num)
                    if idx != len(to_label):
                        raise TseqError(f"{name}: ids are not dense at {idx}")
                    to_id[label] = idx
                    to_label.append(label)
        return tables


def _open_source(source: str | Path | TextIO | Iterable[str]):
    if isinstance(source, (str, Path)):
        return open(source, encoding="utf-8", newline=""), True
    return source, False


def parse_dbmart(
    source: str | Path | TextIO | Iterable[str],
) -> tuple[Dbmart, LookupTables]:
    """Parse a dbmart CSV into a numeric event table plus its lookup tables.

    Rows keep their input order; ids are dense and assigned in
    first-appearance order, so identical bytes always yield identical ids.
    """
    fh, owned = _open_source(source)
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise MissingColumn(REQUIRED_COLUMNS[0])
        positions = {}
        for col in REQUIRED_COLUMNS:
            try:
                positions[col] = header.index(col)
            except ValueError:
                raise MissingColumn(col) from None
        p_col, d_col, x_col = (positions[c] for c in REQUIRED_COLUMNS)

        lookups = LookupTables()
        patients: list[int] = []
        days: list[int] = []
        phenx: list[int] = []
        date_cache: dict[str, int] = {}
        for row in reader:
            if not row:
                continue
            text = row[d_col]
            day = date_cache.get(text)
            if day is None:
                try:
                    day = datetime.date.fromisoformat(text).toordinal()
                except ValueError:
                    raise MalformedDate(reader.line_num, text) from None
                date_cache[text] = day
            patients.append(lookups.intern_patient(row[p_col]))
            days.append(day)
            phenx.append(lookups.intern_phenx(row[x_col]))
    finally:
        if owned:
            fh.close()

    dbmart = Dbmart(
        np.array(patients, np.uint32),
        np.array(days, np.int32),
        np.array(phenx, np.uint32),
    )
    return dbmart, lookups


def write_dbmart_csv(
    dbmart: Dbmart, lookups: LookupTables, destination: str | Path | TextIO
) -> None:
    """Write an event table back to dbmart CSV form using its original labels."""
    fh, owned = (
        (open(destination, "w", encoding="utf-8", newline=""), True)
        if isinstance(destination, (str, Path))
        else (destination, False)
    )
    try:
        writer = csv.writer(fh)
        writer.writerow(REQUIRED_COLUMNS)
        for p, d, x in zip(dbmart.patient, dbmart.day, dbmart.phenx):
            writer.writerow(
                (
                    lookups.patient_label(int(p)),
                    datetime.date.fromordinal(int(d)).isoformat(),
                    lookups.phenx_label(int(x)),
                )
            )
    finally:
        if owned:
            fh.close()


def translate_sequences(seqs: SequenceArray, lookups: LookupTables) -> pd.DataFrame:
    """Label a sequence array with its original patient and phenX strings.

    Columns: ``patient``, ``start_phenx``, ``end_phenx``, ``duration_days``.
    """
    starts = seqs.starts()
    ends = seqs.ends()
    if len(seqs):
        top_phenx = int(max(starts.max(), ends.max()))
        if top_phenx >= len(lookups.id_to_phenx):
            raise UnknownId(f"phenX id {top_phenx} outside lookup range")
        top_patient = int(seqs.patient.max())
        if top_patient >= len(lookups.id_to_patient):
            raise UnknownId(f"patient id {top_patient} outside lookup range")
    phenx_labels = np.asarray(lookups.id_to_phenx, dtype=object)
    patient_labels = np.asarray(lookups.id_to_patient, dtype=object)
    return pd.DataFrame(
        {
            "patient": patient_labels[seqs.patient],
            "start_phenx": phenx_labels[starts],
            "end_phenx": phenx_labels[ends],
            "duration_days": seqs.duration,
        }
    )


def first_occurrence_filter(dbmart: Dbmart) -> Dbmart:
    """Keep only the earliest event of each (patient, phenX) pair.

    Date ties are broken by input order; survivors keep their relative input
    order. Idempotent.
    """
    n = len(dbmart)
    if n == 0:
        return dbmart
    order = np.lexsort((np.arange(n), dbmart.day, dbmart.phenx, dbmart.patient))
    p = dbmart.patient[order]
    x = dbmart.phenx[order]
    run_start = np.ones(n, bool)
    run_start[1:] = (p[1:] != p[:-1]) | (x[1:] != x[:-1])
    survivors = np.sort(order[run_start])
    return dbmart.take(survivors)


def read_dbmart(path: str | Path) -> tuple[Dbmart, LookupTables]:
    """Alias of :func:`parse_dbmart` for file paths; reads UTF-8 CSV."""
    return parse_dbmart(path)


def parse_dbmart_text(text: str) -> tuple[Dbmart, LookupTables]:
    """Parse a dbmart given as an in-memory CSV string (mostly for tests)."""
    return parse_dbmart(io.StringIO(text))
