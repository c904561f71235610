"""Run-length codec over symbol streams.

Runs are maximal, lengths are u32 (longer runs split), and decode is an exact
inverse. The average-bits metric prices each run at the fixed symbol width
plus the 32-bit length, spread over the samples it covers.
"""

from __future__ import annotations

import numpy as np

from .errors import CorruptArchiveError, DataError

_MAX_RUN = 0xFFFFFFFF


def run_length_encode(codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse a symbol stream into (values, lengths), both uint32.

    Runs are maximal except that a run longer than u32 holds is emitted as
    several back-to-back runs of the same value.
    """
    n = len(codes)
    if n == 0:
        return np.empty(0, np.uint32), np.empty(0, np.uint32)
    starts = np.r_[0, np.flatnonzero(np.diff(codes)) + 1]
    values = codes[starts].astype(np.uint32)
    lengths = np.diff(np.r_[starts, n]).astype(np.int64)
    if int(lengths.max()) > _MAX_RUN:
        reps = (lengths + _MAX_RUN - 1) // _MAX_RUN
        values = np.repeat(values, reps)
        split = np.full(int(reps.sum()), _MAX_RUN, np.int64)
        split[np.cumsum(reps) - 1] = lengths - (reps - 1) * _MAX_RUN
        lengths = split
    return values, lengths.astype(np.uint32)


def run_length_decode(values: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    """Expand (values, lengths) back into the symbol stream."""
    if len(values) != len(lengths):
        raise CorruptArchiveError("run values and lengths differ in count")
    if len(lengths) and not lengths.all():
        raise CorruptArchiveError("zero-length run")
    return np.repeat(values, lengths.astype(np.int64)).astype(np.uint32)


def average_bits_rle(lengths: np.ndarray, cap: int) -> float:
    """Cost of the run representation in bits per original sample.

    Each run spends ceil(log2 cap) bits on its value and 32 on its length.
    """
    if len(lengths) == 0:
        raise DataError("no runs")
    value_bits = max(1, (cap - 1).bit_length())
    total = int(lengths.astype(np.int64).sum())
    return len(lengths) * (value_bits + 32) / total
