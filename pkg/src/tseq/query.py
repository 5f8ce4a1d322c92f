"""Duration-aware filters over mined sequences.

All filters are pure subset operations: they preserve the input's relative
order, never mutate it, and compose in any order. The transitive filter keeps
every record whose end phenX is reachable as the end of some record with the
given start, which is the extraction step downstream disease workflows build
on.
"""

from __future__ import annotations

import numpy as np

from .model import SequenceArray


def filter_by_start(seqs: SequenceArray, start: int) -> SequenceArray:
    """Records whose decoded start phenX equals ``start``."""
    return seqs.take(np.flatnonzero(seqs.starts() == np.uint32(start)))


def filter_by_end(seqs: SequenceArray, end: int) -> SequenceArray:
    """Records whose decoded end phenX equals ``end``."""
    return seqs.take(np.flatnonzero(seqs.ends() == np.uint32(end)))


def filter_by_min_duration(seqs: SequenceArray, min_days: int) -> SequenceArray:
    """Records lasting at least ``min_days`` days."""
    return seqs.take(np.flatnonzero(seqs.duration >= np.uint32(min_days)))


def transitive_end_sequences(seqs: SequenceArray, start: int) -> SequenceArray:
    """Records ending in any phenX that some ``start``-sequence ends in.

    Two linear passes: collect the set E of end ids over records whose start
    is ``start`` (a dense boolean table, since ids are dense), then keep every
    record, regardless of its own start, whose end lies in E. A phenX counts
    as reachable if at least one patient exhibits it.
    """
    if len(seqs) == 0:
        return SequenceArray.empty()
    ends = seqs.ends()
    from_start = seqs.starts() == np.uint32(start)
    if not from_start.any():
        return SequenceArray.empty()
    reachable = np.zeros(int(ends.max()) + 1, bool)
    reachable[ends[from_start]] = True
    return seqs.take(np.flatnonzero(reachable[ends]))
