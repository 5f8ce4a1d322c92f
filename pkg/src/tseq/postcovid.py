"""Post COVID-19 symptom identification over mined sequences.

Two stages. Candidate extraction keeps, per patient, symptoms that follow the
covid code and persist: observed more than once, with duration observations
spanning at least ``min_persistence_months`` month buckets (WHO two-month
criterion). Correlation exclusion then removes, per patient, candidates that
an alternate sequence explains: some A = other_start -> symptom that the
patient has, where over the whole cohort the phi coefficient between "has A"
and "has the (symptom, bucket) tuple" clears the correlation threshold at
chi-square significance. Exclusions are correlational, never causal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import stats

from .encoding import DurationUnit, decode_sequence, decode_start_array
from .errors import DegenerateCohort
from .model import SequenceArray
from .query import transitive_end_sequences


@dataclass(frozen=True)
class PostCovidConfig:
    covid_phenx: int
    min_persistence_months: int = 2
    correlation_threshold: float = 0.7
    significance_alpha: float = 0.05
    bucket_unit: DurationUnit = DurationUnit.MONTHS

    def __post_init__(self) -> None:
        if self.min_persistence_months < 0:
            raise ValueError("min_persistence_months must be non-negative")
        if not 0.0 <= self.correlation_threshold <= 1.0:
            raise ValueError("correlation_threshold must lie in [0, 1]")
        if not 0.0 < self.significance_alpha < 1.0:
            raise ValueError("significance_alpha must lie in (0, 1)")


@dataclass(frozen=True)
class CandidateSymptom:
    """One patient's persistent covid-following symptom with its evidence."""

    patient: int
    symptom: int
    observations: tuple[int, ...]
    min_bucket: int
    max_bucket: int

    def __post_init__(self) -> None:
        if not self.observations:
            raise ValueError("a candidate needs at least one observation")
        if self.max_bucket < self.min_bucket:
            raise ValueError("bucket range inverted")

    @property
    def bucket_span(self) -> int:
        return self.max_bucket - self.min_bucket


@dataclass(frozen=True)
class ConfirmedSymptom:
    patient: int
    symptom: int
    observation_count: int
    bucket_span: int


@dataclass(frozen=True)
class ExcludedSymptom:
    patient: int
    symptom: int
    excluding_sequence: int
    correlation: float
    p_value: float


@dataclass(frozen=True)
class PostCovidReport:
    confirmed: tuple[ConfirmedSymptom, ...]
    excluded: tuple[ExcludedSymptom, ...]

    def __post_init__(self) -> None:
        keys = [(c.patient, c.symptom) for c in self.confirmed]
        keys += [(e.patient, e.symptom) for e in self.excluded]
        if len(set(keys)) != len(keys):
            raise ValueError("confirmed and excluded must partition candidates")


def extract_candidates(
    seqs: SequenceArray, config: PostCovidConfig
) -> list[CandidateSymptom]:
    """Persistent covid-following symptoms, one record per (patient, symptom).

    Follows the vignette steps literally: restrict to sequences whose end is
    transitively reachable from the covid code, drop those not starting with
    covid, group by (patient, end), and drop groups observed once or whose
    duration observations span fewer than min_persistence_months buckets.
    """
    reached = transitive_end_sequences(seqs, config.covid_phenx)
    from_covid = decode_start_array(reached.seq) == config.covid_phenx
    covid_seqs = reached.take(np.flatnonzero(from_covid))
    if len(covid_seqs) == 0:
        return []

    order = np.lexsort((covid_seqs.duration, covid_seqs.seq, covid_seqs.patient))
    patient = covid_seqs.patient[order]
    seq = covid_seqs.seq[order]
    duration = covid_seqs.duration[order]
    bucket = duration // np.uint32(config.bucket_unit.divisor)

    new_group = np.ones(len(order), dtype=bool)
    new_group[1:] = (patient[1:] != patient[:-1]) | (seq[1:] != seq[:-1])
    starts = np.flatnonzero(new_group)
    ends = np.append(starts[1:], len(order))

    candidates: list[CandidateSymptom] = []
    for lo, hi in zip(starts, ends):
        if hi - lo < 2:
            continue
        lo_bucket = int(bucket[lo:hi].min())
        hi_bucket = int(bucket[lo:hi].max())
        if hi_bucket - lo_bucket < config.min_persistence_months:
            continue
        _, symptom = decode_sequence(int(seq[lo]))
        candidates.append(
            CandidateSymptom(
                patient=int(patient[lo]),
                symptom=symptom,
                observations=tuple(int(d) for d in duration[lo:hi]),
                min_bucket=lo_bucket,
                max_bucket=hi_bucket,
            )
        )
    return candidates


def phi_coefficient(n11: int, n10: int, n01: int, n00: int) -> float:
    """Pearson correlation of two binary indicators from their 2x2 table.

    Returns 0.0 when a margin is empty (one indicator is constant), where the
    correlation is undefined and no association can be claimed.
    """
    r1, r0 = n11 + n10, n01 + n00
    c1, c0 = n11 + n01, n10 + n00
    denom = r1 * r0 * c1 * c0
    if denom == 0:
        return 0.0
    return (n11 * n00 - n10 * n01) / math.sqrt(denom)


def chi_square_p(phi: float, cohort_size: int) -> float:
    """Uncorrected chi-square p-value for a 2x2 table, chi2 = N * phi^2."""
    return float(stats.chi2.sf(cohort_size * phi * phi, df=1))


def _patient_sets(
    patient: np.ndarray, key: np.ndarray
) -> dict[int, frozenset[int]]:
    """Distinct patients per key value."""
    out: dict[int, set[int]] = {}
    for p, k in zip(patient.tolist(), key.tolist()):
        out.setdefault(int(k), set()).add(int(p))
    return {k: frozenset(v) for k, v in out.items()}


def correlation_exclusion(
    seqs: SequenceArray,
    candidates: Iterable[CandidateSymptom],
    config: PostCovidConfig,
) -> PostCovidReport:
    """Partition candidates into confirmed and correlation-excluded.

    For each candidate symptom, every alternate sequence ending in it (start
    not covid) is tested cohort-wide against each (symptom, bucket) tuple the
    candidates exhibit. A patient's candidate is excluded when some alternate
    the patient has clears both thresholds for one of the patient's own
    buckets; the strongest explanation (max phi, then min p, then smallest
    sequence id) is recorded.
    """
    candidates = list(candidates)
    cohort = np.unique(seqs.patient)
    if len(cohort) < 2:
        raise DegenerateCohort(len(cohort))
    cohort_size = len(cohort)

    ends = seqs.ends()
    starts = seqs.starts()
    divisor = np.uint32(config.bucket_unit.divisor)

    confirmed: list[ConfirmedSymptom] = []
    excluded: list[ExcludedSymptom] = []
    for symptom in sorted({c.symptom for c in candidates}):
        of_symptom = ends == symptom
        alt_rows = np.flatnonzero(of_symptom & (starts != config.covid_phenx))
        covid_rows = np.flatnonzero(of_symptom & (starts == config.covid_phenx))
        holders_by_alt = _patient_sets(seqs.patient[alt_rows], seqs.seq[alt_rows])
        holders_by_bucket = _patient_sets(
            seqs.patient[covid_rows], seqs.duration[covid_rows] // divisor
        )

        # Cohort-level screen: qualifying (alternate, bucket) pairs.
        qualifying: dict[int, list[tuple[int, float, float]]] = {}
        for alt in sorted(holders_by_alt):
            has_alt = holders_by_alt[alt]
            for bucket in sorted(holders_by_bucket):
                has_tuple = holders_by_bucket[bucket]
                n11 = len(has_alt & has_tuple)
                n10 = len(has_alt) - n11
                n01 = len(has_tuple) - n11
                n00 = cohort_size - n11 - n10 - n01
                phi = phi_coefficient(n11, n10, n01, n00)
                p = chi_square_p(phi, cohort_size)
                if phi >= config.correlation_threshold and p <= config.significance_alpha:
                    qualifying.setdefault(bucket, []).append((alt, phi, p))

        for cand in candidates:
            if cand.symptom != symptom:
                continue
            own_buckets = {obs // config.bucket_unit.divisor for obs in cand.observations}
            best: tuple[float, float, int] | None = None
            for bucket in own_buckets:
                for alt, phi, p in qualifying.get(bucket, []):
                    if cand.patient not in holders_by_alt[alt]:
                        continue
                    ranked = (-phi, p, alt)
                    if best is None or ranked < best:
                        best = ranked
            if best is None:
                confirmed.append(
                    ConfirmedSymptom(
                        cand.patient, cand.symptom, len(cand.observations), cand.bucket_span
                    )
                )
            else:
                excluded.append(
                    ExcludedSymptom(
                        cand.patient, cand.symptom, best[2], -best[0], best[1]
                    )
                )
    return PostCovidReport(tuple(confirmed), tuple(excluded))


def run_postcovid(seqs: SequenceArray, config: PostCovidConfig) -> PostCovidReport:
    return correlation_exclusion(seqs, extract_candidates(seqs, config), config)
