"""Shared test utilities: field generators and independent reference codecs.

The reference implementations here are deliberately written with different
algorithms and data structures than the library (scalar loops, dicts,
sorted-list merging) so that agreement between the two is meaningful.
"""

from __future__ import annotations

import numpy as np

from lzebc import Field


def make_field(rng: np.random.Generator, ndim: int, dtype=np.float64,
               kind: str | None = None) -> Field:
    """Random structured test field within the acceptance size envelope."""
    if ndim == 1:
        shape = (int(rng.integers(2, 4097)),)
    elif ndim == 2:
        shape = tuple(int(n) for n in rng.integers(2, 129, 2))
    else:
        shape = tuple(int(n) for n in rng.integers(2, 49, 3))
    kind = kind or rng.choice(["walk", "waves", "ramp", "noise", "spiky"])
    if kind == "walk":
        data = np.cumsum(rng.normal(size=shape), axis=-1)
    elif kind == "waves":
        grids = np.meshgrid(*[np.linspace(0, rng.uniform(1, 9), n) for n in shape],
                            indexing="ij")
        data = sum(np.sin(g * rng.uniform(1, 4)) for g in grids) * rng.uniform(1, 100)
    elif kind == "ramp":
        data = np.add.reduce(np.meshgrid(*[np.arange(n) for n in shape],
                                         indexing="ij")).astype(np.float64)
        data = data * rng.uniform(0.01, 2.0) + rng.normal(size=shape) * 0.1
    elif kind == "spiky":
        data = np.cumsum(rng.normal(size=shape), axis=-1)
        flat = data.reshape(-1)
        hits = rng.integers(0, flat.size, size=max(1, flat.size // 50))
        flat[hits] += rng.normal(scale=100.0, size=len(hits))
        data = flat.reshape(shape)
    else:
        data = rng.normal(size=shape) * rng.uniform(0.1, 1000)
    if data.std() == 0:  # guard against degenerate draws
        data = data + rng.normal(size=shape)
    return Field.from_array(np.ascontiguousarray(data, dtype=dtype))


def reference_decode_bits(data: np.ndarray, bit_len: int, count: int,
                          lengths: np.ndarray, codes: np.ndarray) -> list[int]:
    """Bit-at-a-time prefix decoder driven by a (length, code) -> symbol dict."""
    table = {(int(lengths[s]), int(codes[s])): s
             for s in np.flatnonzero(lengths)}
    out = []
    acc = 0
    nbits = 0
    for pos in range(bit_len):
        bit = (int(data[pos // 8]) >> (7 - pos % 8)) & 1
        acc = (acc << 1) | bit
        nbits += 1
        sym = table.get((nbits, acc))
        if sym is not None:
            out.append(sym)
            acc = 0
            nbits = 0
    assert nbits == 0, "stream ended mid code word"
    assert len(out) == count
    return out


def reference_huffman_cost(counts: np.ndarray) -> int:
    """Optimal prefix-code cost sum(freq * len) via two-queue merging.

    Sorted-queue Huffman, structurally unlike the library's heap version.
    Returns the total weighted length, which is unique even when trees differ.
    """
    freqs = sorted(int(c) for c in counts if c > 0)
    if len(freqs) == 1:
        return freqs[0]
    leaves = list(freqs)
    merged: list[int] = []
    total = 0
    while len(leaves) + len(merged) > 1:
        picks = []
        for _ in range(2):
            if leaves and (not merged or leaves[0] <= merged[0]):
                picks.append(leaves.pop(0))
            else:
                picks.append(merged.pop(0))
        total += picks[0] + picks[1]
        merged.append(picks[0] + picks[1])
    return total


def scalar_quantize_chunk(chunk: np.ndarray, radius: int, ndim: int):
    """Reference quantizer: explicit neighbor reads, no array tricks.

    chunk is [z, y, x] int64 prequant values. Returns (codes, outliers) with
    codes flat row-major and outliers as {local flat index: exact delta}.
    """
    nz, ny, nx = chunk.shape

    def val(z, y, x):
        return int(chunk[z, y, x]) if z >= 0 and y >= 0 and x >= 0 else 0

    codes = []
    outliers = {}
    pos = 0
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                if ndim == 1:
                    pred = val(z, y, x - 1)
                elif ndim == 2:
                    pred = val(z, y - 1, x) + val(z, y, x - 1) - val(z, y - 1, x - 1)
                else:
                    pred = (val(z - 1, y - 1, x - 1) - val(z - 1, y - 1, x)
                            - val(z, y - 1, x - 1) + val(z, y - 1, x)
                            - val(z - 1, y, x - 1) + val(z - 1, y, x)
                            + val(z, y, x - 1))
                delta = int(chunk[z, y, x]) - pred
                if -radius < delta < radius:
                    codes.append(delta + radius)
                else:
                    codes.append(radius)
                    outliers[pos] = delta
                pos += 1
    return np.array(codes, np.uint32), outliers
