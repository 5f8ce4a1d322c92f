import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_rows, mine_rows, rows_to_csv
from tseq import (
    ArithmeticOverflow,
    MinerConfig,
    PatientExceedsLimit,
    SequenceArray,
    estimate_sequence_count,
    iter_chunks,
    mine_all,
    parse_dbmart_text,
    plan_chunks,
    plan_for_dbmart,
    sort_dbmart,
)
from tseq.chunking import DEFAULT_CHUNK_LIMIT


def test_estimate_matches_pair_formula():
    # three patients with 100 entries each: 3 * 100*99/2
    assert estimate_sequence_count([100, 100, 100]) == 3 * 4950
    assert estimate_sequence_count([]) == 0
    assert estimate_sequence_count([0, 1]) == 0


def test_estimate_overflow_guard():
    # a single patient big enough that n(n-1)/2 > 2^64 - 1
    with pytest.raises(ArithmeticOverflow):
        estimate_sequence_count([2**33, 2**33])


def test_example_split_two_then_one():
    """[100, 100, 100] under limit 10,000 packs as [p0, p1] then [p2]."""
    plan = plan_chunks([100, 100, 100], limit=10_000)
    assert plan.chunk_bounds == [(0, 2), (2, 3)]
    assert plan.predicted_counts == [9_900, 4_950]


def test_patient_over_limit_is_named():
    with pytest.raises(PatientExceedsLimit, match="7"):
        plan_chunks([10, 200, 10], limit=1_000, patient_ids=[3, 7, 9])


def test_default_limit_is_i32_element_cap():
    assert DEFAULT_CHUNK_LIMIT == 2**31 - 1


def test_plan_tsv_shape():
    plan = plan_chunks([100, 100, 100], limit=10_000, patient_ids=[5, 6, 9])
    lines = plan.to_tsv().splitlines()
    assert lines[0] == "chunk\tfirst_patient\tlast_patient\tpatients\tpredicted_sequences"
    assert lines[1] == "0\t5\t6\t2\t9900"
    assert lines[2] == "1\t9\t9\t1\t4950"


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=0, max_size=30), st.integers(1, 2000))
def test_plan_partitions_and_respects_limit(entries, limit):
    worst = max((n * (n - 1) // 2 for n in entries), default=0)
    if worst > limit:
        with pytest.raises(PatientExceedsLimit):
            plan_chunks(entries, limit)
        return
    plan = plan_chunks(entries, limit)
    covered = [i for lo, hi in plan.chunk_bounds for i in range(lo, hi)]
    assert covered == list(range(len(entries)))
    for (lo, hi), predicted in zip(plan.chunk_bounds, plan.predicted_counts):
        assert predicted <= limit
        assert predicted == estimate_sequence_count(entries[lo:hi])


def test_chunked_mining_equals_whole():
    rows = make_rows(np.random.default_rng(23), 20, 14)
    whole, _ = mine_rows(rows)
    dbmart, _ = parse_dbmart_text(rows_to_csv(rows))
    ordered = sort_dbmart(dbmart)
    for limit in (95, 150, 500, 10**6):
        plan = plan_for_dbmart(ordered, limit)
        parts = [
            mine_all(chunk, MinerConfig()) for chunk in iter_chunks(ordered, plan)
        ]
        rejoined = SequenceArray.concat(parts)
        assert rejoined.tobytes() == whole.tobytes()


def test_large_cohort_estimate():
    """5,000 patients at 400 entries each predict 399,000,000 sequences."""
    assert estimate_sequence_count([400] * 5000) == 399_000_000
