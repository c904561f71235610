"""Symbol statistics and canonical Huffman codebooks.

The codebook build is fully deterministic: heap ties are broken by symbol
index for leaves and by creation order for internal nodes, and code words are
assigned canonically (shorter lengths first, then ascending symbol). Only the
per-symbol lengths are serialized; the decoder reassigns the same code words
from lengths alone.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import CorruptArchiveError, DataError

# Code words are stored in uint64; deeper trees cannot be serialized.
MAX_CODE_LEN = 64


def histogram(codes: np.ndarray, cap: int) -> np.ndarray:
    """Count symbol occurrences, int64 of length cap."""
    if len(codes) and int(codes.max()) >= cap:
        raise DataError(f"symbol {int(codes.max())} out of range for cap {cap}")
    return np.bincount(codes, minlength=cap).astype(np.int64)


def entropy_bits(counts: np.ndarray) -> float:
    """Shannon entropy of the empirical distribution, in bits per symbol."""
    total = counts.sum()
    if total == 0:
        raise DataError("entropy of an empty histogram")
    p = counts[counts > 0] / total
    # + 0.0 normalizes the -0.0 a pure distribution produces
    return float(-(p * np.log2(p)).sum()) + 0.0


def dominant_probability(counts: np.ndarray) -> float:
    """Empirical probability of the most frequent symbol."""
    total = counts.sum()
    if total == 0:
        raise DataError("empty histogram")
    return float(counts.max() / total)


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def redundancy_upper(p1: float) -> float:
    """Upper bound on Huffman redundancy given the dominant probability."""
    return p1 + 0.086


def redundancy_lower(p1: float) -> float:
    """Lower bound on Huffman redundancy; informative only for p1 > 0.4."""
    return 1.0 - binary_entropy(p1) if p1 > 0.4 else 0.0


@dataclass(frozen=True)
class EntropyReport:
    """Entropy and the average-bit-length bracket it implies.

    b_exact is present when a codebook was built; b_lo/b_hi bracket the
    average code length without one.
    """

    entropy: float
    p1: float
    r_minus: float
    r_plus: float
    b_lo: float
    b_hi: float
    b_exact: float | None = None


def entropy_report(counts: np.ndarray, book: "Codebook | None" = None) -> EntropyReport:
    """Summarize a histogram; include the exact average bits if a codebook is given."""
    h = entropy_bits(counts)
    p1 = dominant_probability(counts)
    r_minus, r_plus = redundancy_lower(p1), redundancy_upper(p1)
    b_exact = book.average_bits(counts) if book is not None else None
    return EntropyReport(h, p1, r_minus, r_plus, h + r_minus, h + r_plus, b_exact)


@dataclass(frozen=True)
class Codebook:
    """Canonical prefix code: per-symbol bit lengths and code words.

    Symbols with length 0 do not occur. Code words are MSB-first, i.e. the
    length low bits of ``codes[s]`` are the bits written to the stream,
    most significant first.
    """

    lengths: np.ndarray  # uint8, shape (cap,)
    codes: np.ndarray  # uint64, shape (cap,)

    @property
    def cap(self) -> int:
        return len(self.lengths)

    @property
    def max_len(self) -> int:
        return int(self.lengths.max())

    def average_bits(self, counts: np.ndarray) -> float:
        """Expected code length under the empirical distribution."""
        total = counts.sum()
        if total == 0:
            raise DataError("empty histogram")
        return float((counts * self.lengths).sum() / total)

    def serialize_lengths(self) -> bytes:
        return self.lengths.tobytes()

    @classmethod
    def from_counts(cls, counts: np.ndarray) -> "Codebook":
        lengths = _huffman_lengths(counts)
        return cls(lengths, _canonical_codes(lengths))

    @classmethod
    def from_lengths(cls, raw: bytes | np.ndarray) -> "Codebook":
        """Rebuild a codebook from serialized lengths, validating the code."""
        lengths = np.frombuffer(raw, np.uint8).copy() if isinstance(raw, bytes) else raw
        if lengths.max(initial=0) > MAX_CODE_LEN:
            raise CorruptArchiveError("codebook length exceeds 64 bits")
        n = int((lengths > 0).sum())
        if n == 0:
            raise CorruptArchiveError("codebook has no symbols")
        kraft = sum(1 << (MAX_CODE_LEN - int(l)) for l in lengths if l)
        if n == 1:
            if int(lengths.max()) != 1:
                raise CorruptArchiveError("single-symbol codebook must use length 1")
        elif kraft != 1 << MAX_CODE_LEN:
            raise CorruptArchiveError("codebook lengths violate Kraft equality")
        return cls(lengths, _canonical_codes(lengths))


def _huffman_lengths(counts: np.ndarray) -> np.ndarray:
    """Code lengths of a deterministic Huffman tree over nonzero symbols."""
    cap = len(counts)
    symbols = np.flatnonzero(counts)
    n = len(symbols)
    if n == 0:
        raise DataError("cannot build a codebook from an empty histogram")
    lengths = np.zeros(cap, np.uint8)
    if n == 1:
        # A lone symbol still gets one bit so the stream length is defined.
        lengths[symbols[0]] = 1
        return lengths
    # Heap entries are (frequency, tie order, node id): leaves use their
    # symbol as tie order, internal nodes use cap + creation counter.
    parent = np.full(2 * n - 1, -1, np.int64)
    heap = [(int(counts[s]), int(s), i) for i, s in enumerate(symbols)]
    heapq.heapify(heap)
    next_id = n
    while len(heap) > 1:
        fa, _, a = heapq.heappop(heap)
        fb, _, b = heapq.heappop(heap)
        parent[a] = parent[b] = next_id
        heapq.heappush(heap, (fa + fb, cap + (next_id - n), next_id))
        next_id += 1
    for i, s in enumerate(symbols):
        depth = 0
        node = i
        while parent[node] >= 0:
            node = parent[node]
            depth += 1
        if depth > MAX_CODE_LEN:
            raise DataError("histogram too skewed: code length exceeds 64 bits")
        lengths[s] = depth
    return lengths


def _canonical_codes(lengths: np.ndarray) -> np.ndarray:
    """Assign canonical code words: by ascending (length, symbol)."""
    codes = np.zeros(len(lengths), np.uint64)
    order = sorted(np.flatnonzero(lengths), key=lambda s: (lengths[s], s))
    code = 0
    prev_len = int(lengths[order[0]]) if order else 0
    for i, s in enumerate(order):
        if i:
            code = (code + 1) << (int(lengths[s]) - prev_len)
            prev_len = int(lengths[s])
        codes[s] = code
    return codes
