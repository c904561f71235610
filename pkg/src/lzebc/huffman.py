"""Bit-packed encode/decode of symbol streams against a canonical codebook.

Encoding is vectorized numpy (per-symbol code bits expanded and packed
MSB-first); decoding walks the stream bit by bit in a compiled kernel using
the first-code/limit tables that canonical codes admit. Both directions are
exact inverses for any valid codebook.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from numba import njit

from .codebook import MAX_CODE_LEN, Codebook
from .errors import CorruptArchiveError, DataError

_HEADER = struct.Struct("<QQ")  # bit length, symbol count


@dataclass(frozen=True)
class BitStream:
    """A packed MSB-first bit string with its exact bit and symbol counts."""

    bit_len: int
    count: int
    data: np.ndarray  # uint8, ceil(bit_len / 8) bytes

    def to_bytes(self) -> bytes:
        return _HEADER.pack(self.bit_len, self.count) + self.data.tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "BitStream":
        if len(raw) < _HEADER.size:
            raise CorruptArchiveError("bit stream shorter than its header")
        bit_len, count = _HEADER.unpack_from(raw)
        nbytes = (bit_len + 7) // 8
        if len(raw) - _HEADER.size < nbytes:
            raise CorruptArchiveError("bit stream data truncated")
        data = np.frombuffer(raw, np.uint8, count=nbytes, offset=_HEADER.size).copy()
        return cls(bit_len, count, data)


def encode(codes: np.ndarray, book: Codebook) -> BitStream:
    """Concatenate the code words of ``codes`` into a packed bit stream."""
    n = len(codes)
    if n == 0:
        return BitStream(0, 0, np.empty(0, np.uint8))
    lens = book.lengths[codes].astype(np.int64)
    if not lens.all():
        raise DataError("symbol without a code word in the stream")
    ends = np.cumsum(lens)
    total = int(ends[-1])
    sym_of_bit = np.repeat(np.arange(n, dtype=np.int64), lens)
    # Bit j of symbol i is code[i] >> (len[i]-1-j), MSB first.
    j = np.arange(total, dtype=np.int64) - np.repeat(ends - lens, lens)
    shift = (lens[sym_of_bit] - 1 - j).astype(np.uint64)
    bits = ((book.codes[codes][sym_of_bit] >> shift) & np.uint64(1)).astype(np.uint8)
    return BitStream(total, n, np.packbits(bits))


def _decode_tables(book: Codebook) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Canonical decode tables: per-length first code, one-past-last code,
    and the offset of each length's first symbol in the (length, symbol)
    sorted symbol list."""
    first = np.zeros(MAX_CODE_LEN + 1, np.uint64)
    limit = np.zeros(MAX_CODE_LEN + 1, np.uint64)
    offset = np.zeros(MAX_CODE_LEN + 1, np.int64)
    active = np.flatnonzero(book.lengths)
    order = active[np.lexsort((active, book.lengths[active]))]
    lens = book.lengths[order]
    pos = 0
    for length in range(1, MAX_CODE_LEN + 1):
        k = int((lens == length).sum())
        if k:
            first[length] = book.codes[order[pos]]
            limit[length] = int(book.codes[order[pos + k - 1]]) + 1
            offset[length] = pos
            pos += k
    return first, limit, offset, order.astype(np.uint32)


@njit(cache=True)
def _decode_kernel(data, bit_len, first, limit, offset, symbols, out):  # pragma: no cover
    n = len(out)
    emitted = 0
    acc = np.uint64(0)
    length = 0
    for pos in range(bit_len):
        bit = (data[pos >> 3] >> (7 - (pos & 7))) & 1
        acc = (acc << np.uint64(1)) | np.uint64(bit)
        length += 1
        if length > MAX_CODE_LEN:
            return -1  # no code word this long
        if limit[length] > first[length] and first[length] <= acc < limit[length]:
            if emitted == n:
                return -2  # more code words than declared
            out[emitted] = symbols[offset[length] + np.int64(acc - first[length])]
            emitted += 1
            acc = np.uint64(0)
            length = 0
    if length != 0:
        return -3  # stream ends mid code word
    return emitted


def decode(stream: BitStream, book: Codebook) -> np.ndarray:
    """Recover the symbol sequence from a packed bit stream."""
    out = np.empty(stream.count, np.uint32)
    if stream.count == 0:
        if stream.bit_len != 0:
            raise CorruptArchiveError("bit stream claims bits but no symbols")
        return out
    first, limit, offset, symbols = _decode_tables(book)
    got = _decode_kernel(
        stream.data, stream.bit_len, first, limit, offset, symbols, out
    )
    if got != stream.count:
        raise CorruptArchiveError("bit stream does not decode to its declared symbols")
    return out
