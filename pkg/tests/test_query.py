import numpy as np

from conftest import mine_rows, str_encode
from tseq import (
    filter_by_end,
    filter_by_min_duration,
    filter_by_start,
    transitive_end_sequences,
)
from tseq.model import SequenceArray


def seqs_from_pairs(pairs, durations=None):
    """Build a SequenceArray from (patient, start, end) integer triples."""
    durations = durations or [0] * len(pairs)
    return SequenceArray(
        np.array([p for p, _, _ in pairs], np.uint32),
        np.array([str_encode(s, e) for _, s, e in pairs], np.uint64),
        np.array(durations, np.uint32),
    )


def test_filters_preserve_order_and_content():
    seqs = seqs_from_pairs(
        [(0, 1, 2), (0, 2, 3), (1, 1, 3), (1, 3, 1)], [5, 10, 15, 20]
    )
    by_start = filter_by_start(seqs, 1)
    assert by_start.seq.tolist() == [str_encode(1, 2), str_encode(1, 3)]
    assert by_start.duration.tolist() == [5, 15]
    by_end = filter_by_end(seqs, 3)
    assert by_end.patient.tolist() == [0, 1]
    by_dur = filter_by_min_duration(seqs, 15)
    assert by_dur.duration.tolist() == [15, 20]
    # input untouched
    assert len(seqs) == 4


def test_min_duration_boundary_inclusive():
    seqs = seqs_from_pairs([(0, 1, 2)], [30])
    assert len(filter_by_min_duration(seqs, 30)) == 1
    assert len(filter_by_min_duration(seqs, 31)) == 0


def test_transitive_end_sequences_hand_example():
    """{A->B, C->B, C->D} from A: B is reachable, so A->B and C->B stay."""
    a, b, c, d = 0, 1, 2, 3
    seqs = seqs_from_pairs([(0, a, b), (0, c, b), (0, c, d)])
    kept = transitive_end_sequences(seqs, a)
    assert kept.seq.tolist() == [str_encode(a, b), str_encode(c, b)]


def test_transitive_end_absent_start_is_empty():
    seqs = seqs_from_pairs([(0, 1, 2)])
    assert len(transitive_end_sequences(seqs, 9)) == 0


def test_transitive_end_on_mined_data_matches_brute_force():
    rows_rng = np.random.default_rng(17)
    from conftest import make_rows

    rows = make_rows(rows_rng, 12, 10, distinct_codes=6)
    mined, lookups = mine_rows(rows)
    start = 2
    reachable = {
        int(e)
        for s, e in zip(mined.starts().tolist(), mined.ends().tolist())
        if s == start
    }
    expected = [
        i for i, e in enumerate(mined.ends().tolist()) if e in reachable
    ]
    kept = transitive_end_sequences(mined, start)
    assert kept.seq.tolist() == mined.seq[expected].tolist()
    assert kept.patient.tolist() == mined.patient[expected].tolist()
