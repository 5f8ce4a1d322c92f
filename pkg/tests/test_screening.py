import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import count_oracle, make_rows, mine_rows, multiset
from tseq import (
    DurationUnit,
    SparsityConfig,
    duration_sparsity_screen,
    sparsity_screen,
)
from tseq.encoding import PATIENT_SENTINEL
from tseq.model import SequenceArray
from tseq.naive import naive_mine, naive_sparsity_screen


def seqs_of(patients, seq_ids, durations) -> SequenceArray:
    return SequenceArray(
        np.array(patients, np.uint32),
        np.array(seq_ids, np.uint64),
        np.array(durations, np.uint32),
    )


def screened_copy(seqs, **kw):
    """Screen a copy; callers keep the original intact for comparison."""
    clone = seqs_of(seqs.patient.copy(), seqs.seq.copy(), seqs.duration.copy())
    return sparsity_screen(clone, SparsityConfig(**kw))


def test_threshold_one_is_identity():
    rows = make_rows(np.random.default_rng(1), 10, 10)
    mined, _ = mine_rows(rows)
    kept = screened_copy(mined, threshold=1)
    assert kept.tobytes() == mined.tobytes()


def test_threshold_above_max_count_empties():
    mined, _ = mine_rows(make_rows(np.random.default_rng(2), 6, 8))
    kept = screened_copy(mined, threshold=len(mined) + 1)
    assert len(kept) == 0


def test_condemned_marked_with_sentinel_in_place():
    seqs = seqs_of([0, 1, 2], [5, 5, 9], [1, 2, 3])
    kept = sparsity_screen(seqs, SparsityConfig(threshold=2))
    # the input is consumed: the sparse record's patient is the sentinel
    assert seqs.patient.tolist() == [0, 1, PATIENT_SENTINEL]
    assert kept.seq.tolist() == [5, 5]


def test_survivors_keep_input_relative_order():
    seqs = seqs_of([3, 1, 2, 1], [7, 7, 42, 7], [0, 0, 0, 0])
    kept = sparsity_screen(seqs, SparsityConfig(threshold=2))
    assert kept.patient.tolist() == [3, 1, 1]
    assert kept.seq.tolist() == [7, 7, 7]


def test_occurrences_vs_distinct_patients():
    # seq 5 occurs 3 times but only in one patient
    seqs = seqs_of([0, 0, 0, 1, 2], [5, 5, 5, 8, 8], [0] * 5)
    by_occ = screened_copy(seqs_of([0, 0, 0, 1, 2], [5, 5, 5, 8, 8], [0] * 5), threshold=3)
    assert by_occ.seq.tolist() == [5, 5, 5]
    by_pat = screened_copy(seqs, threshold=2, count_mode="distinct_patients")
    assert by_pat.seq.tolist() == [8, 8]


@pytest.mark.parametrize("mode", ["occurrences", "distinct_patients"])
@pytest.mark.parametrize("threshold", [1, 2, 3, 4])
def test_counts_match_oracle(mode, threshold):
    mined, _ = mine_rows(
        make_rows(np.random.default_rng(7), 12, 10, distinct_codes=5)
    )
    counts = count_oracle(mined, mode)
    kept = screened_copy(mined, threshold=threshold, count_mode=mode)
    expected = {
        (p, s, d)
        for p, s, d in multiset(mined)
        if counts[s] >= threshold
    }
    assert set(multiset(kept)) == expected


def test_matches_naive_screen_on_mined_rows():
    rows = make_rows(np.random.default_rng(4), 15, 8, distinct_codes=4)
    mined, lookups = mine_rows(rows)
    for threshold in (1, 2, 3, 4):
        kept = screened_copy(mined, threshold=threshold)
        naive_kept = naive_sparsity_screen(naive_mine(rows), threshold)
        assert len(kept) == len(naive_kept)


def test_duration_aware_monthly_buckets():
    """Same pair twice is only dense if both fall in the same month bucket."""
    far = seqs_of([0, 1], [5, 5], [5, 400])  # buckets 0 and 13
    near = seqs_of([0, 1], [5, 5], [3, 10])  # both bucket 0
    config = dict(threshold=2, duration_aware=True, bucket_unit=DurationUnit.MONTHS)
    assert len(sparsity_screen(far, SparsityConfig(**config))) == 0
    kept = sparsity_screen(near, SparsityConfig(**config))
    assert kept.duration.tolist() == [3, 10]


def test_duration_screen_entry_point_requires_flag():
    seqs = seqs_of([0], [5], [1])
    with pytest.raises(ValueError):
        duration_sparsity_screen(seqs, SparsityConfig(threshold=2))


def test_duration_aware_matches_oracle():
    mined, _ = mine_rows(
        make_rows(np.random.default_rng(13), 10, 9, distinct_codes=3, span_days=700)
    )
    config = SparsityConfig(
        threshold=2, duration_aware=True, bucket_unit=DurationUnit.MONTHS
    )
    counts = count_oracle(mined, "occurrences", bucketer=lambda d: d // 30)
    kept = duration_sparsity_screen(
        seqs_of(mined.patient.copy(), mined.seq.copy(), mined.duration.copy()), config
    )
    expected = {
        (p, s, d) for p, s, d in multiset(mined) if counts[(s, d // 30)] >= 2
    }
    assert set(multiset(kept)) == expected


def test_config_validation():
    with pytest.raises(ValueError):
        SparsityConfig(threshold=0)
    with pytest.raises(ValueError):
        SparsityConfig(threshold=2, count_mode="per_site")


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 4))
def test_screen_idempotent(seed, threshold):
    mined, _ = mine_rows(
        make_rows(np.random.default_rng(seed), 8, 8, distinct_codes=4)
    )
    once = screened_copy(mined, threshold=threshold)
    twice = screened_copy(once, threshold=threshold)
    assert twice.tobytes() == once.tobytes()
