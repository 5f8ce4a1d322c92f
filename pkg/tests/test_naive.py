import datetime
from collections import Counter

from tseq.naive import naive_mine, naive_sparsity_screen

ROWS = [
    ("p", "2021-01-01", "A"),
    ("p", "2021-01-03", "B"),
    ("p", "2021-01-10", "A"),
]


def test_hand_example():
    assert sorted(naive_mine(ROWS)) == [
        ("p", "A", "A", 9),
        ("p", "A", "B", 2),
        ("p", "B", "A", 7),
    ]


def test_single_entry_patient_empty():
    assert naive_mine([("q", "2021-01-01", "A")]) == []


def test_empty_input():
    assert naive_mine([]) == []
    assert naive_sparsity_screen([], 3) == []


def test_unsorted_input_is_sorted_first():
    shuffled = [ROWS[2], ROWS[0], ROWS[1]]
    assert sorted(naive_mine(shuffled)) == sorted(naive_mine(ROWS))


def test_n_400_patient_yields_79800():
    base = datetime.date(2020, 1, 1)
    rows = [
        ("p", (base + datetime.timedelta(days=i)).isoformat(), "c")
        for i in range(400)
    ]
    assert len(naive_mine(rows)) == 400 * 399 // 2 == 79_800


def test_screen_threshold_one_is_identity():
    mined = naive_mine(ROWS)
    assert naive_sparsity_screen(mined, 1) == mined


def test_screen_counts_pairs():
    mined = naive_mine(ROWS * 2)  # duplicate every event
    kept = naive_sparsity_screen(mined, 4)
    counts = Counter((s, e) for _, s, e, _ in kept)
    assert kept and all(count >= 4 for count in counts.values())
