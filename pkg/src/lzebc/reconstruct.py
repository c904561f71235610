"""Decoder back end: fuse outliers, partial-sum reconstruction, dequantize.

Reconstruction inverts the nested first differences of the quantizer with
nested inclusive prefix sums, one axis at a time, chunk by chunk. All work is
exact int64 arithmetic, so the decoded integers match a one-by-one sequential
decode bitwise.
"""

from __future__ import annotations

import numpy as np

from .errors import QuantOverflowError
from .grid import SCALAR_DTYPES, ChunkSpec, Field, _check_finite, partition
from .quantize import OutlierList, PrequantGrid, QuantConfig, QuantGrid, _run_chunks

# Any intermediate prefix sum is a box sum of the fused deltas, so a chunk
# whose sum of |delta| stays below 2**62 can never overflow int64.
_PSUM_LIMIT = 2**62


def fuse_outliers(quant: QuantGrid, outliers: OutlierList, cfg: QuantConfig) -> np.ndarray:
    """Recover signed prediction deltas, flat int64.

    In-range positions decode as code - radius; outlier positions hold the
    radius placeholder (delta 0 after the shift), so adding the stored exact
    delta restores them.
    """
    deltas = quant.codes.astype(np.int64) - cfg.radius
    if len(outliers):
        deltas[outliers.indices] += outliers.deltas
    return deltas


def prefix_sum_axis(arr: np.ndarray, axis: int) -> np.ndarray:
    """Inclusive prefix sum along one axis, exact int64."""
    return np.cumsum(arr, axis=axis)


def reconstruct_chunk(deltas: np.ndarray, ndim: int) -> np.ndarray:
    """Reconstruct one chunk of prequantized values from its fused deltas.

    deltas is a [z, y, x] shaped int64 chunk. Applies an inclusive prefix sum
    along x, then y, then z (as the dimensionality requires); neighbors
    outside the chunk count as zero on both sides of the codec, so chunks are
    independent.
    """
    total = np.abs(deltas).sum(dtype=np.float64)
    if total >= _PSUM_LIMIT:
        raise QuantOverflowError(
            "prefix-sum magnitude bound exceeded; use a larger error bound "
            "or smaller chunks"
        )
    out = deltas
    for axis in range(2, 2 - ndim, -1):  # x, then y, then z
        out = prefix_sum_axis(out, axis)
    return out


def reconstruct_grid(
    quant: QuantGrid, outliers: OutlierList, cfg: QuantConfig, spec: ChunkSpec,
    threads: int = 1,
) -> PrequantGrid:
    """Invert quantization over the whole grid, chunk by chunk.

    Chunks write disjoint regions, so any thread count yields the same grid.
    """
    dims = quant.dims
    fused = fuse_outliers(quant, outliers, cfg).reshape(dims.shape3d)
    out = np.empty(dims.shape3d, np.int64)

    def work(view) -> None:
        out[view.slices] = reconstruct_chunk(fused[view.slices], dims.ndim)

    _run_chunks(work, partition(dims, spec), threads)
    return PrequantGrid(dims, out.reshape(-1))


def dequantize(prequant: PrequantGrid, cfg: QuantConfig, dtype: str | np.dtype) -> Field:
    """Scale prequantized integers back to sample values.

    Each decoded value is code * 2 * eb_abs, computed in float64 and then
    cast to the requested scalar width.
    """
    dt = SCALAR_DTYPES[dtype] if isinstance(dtype, str) else np.dtype(dtype)
    values = (prequant.codes * (2.0 * cfg.eb_abs)).astype(dt.base.newbyteorder("="))
    _check_finite(values)
    return Field(prequant.dims, values, float(values.min()), float(values.max()))
