"""Dual-quantization front end: prequantize, Lorenzo-predict, emit quant-codes.

Prequantization integerizes each sample against twice the error bound, so the
prediction step that follows works on exact integers and the whole codec core
is lossless past that point. Prediction deltas that fit inside the quant-code
radius become codes; the rest are gathered as sparse outliers with the radius
value left as an in-grid placeholder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, QuantOverflowError
from .grid import ChunkSpec, Dims, Field, partition

# Prequantized magnitudes are capped well below the int64 limit so that every
# downstream integer step (7-term 3D prediction deltas, nested differences)
# provably stays in range.
_PREQUANT_LIMIT = 2**59


@dataclass(frozen=True)
class QuantConfig:
    """Quantizer settings: dictionary size and absolute error bound."""

    eb_abs: float
    cap: int = 1024

    def __post_init__(self) -> None:
        if self.cap < 4 or self.cap & (self.cap - 1):
            raise DataError(f"cap must be a power of two >= 4, got {self.cap}")
        if not (np.isfinite(self.eb_abs) and self.eb_abs > 0):
            raise DataError(f"eb_abs must be positive and finite, got {self.eb_abs}")

    @property
    def radius(self) -> int:
        return self.cap // 2


@dataclass(frozen=True)
class PrequantGrid:
    """Integerized samples: codes[i] = round(values[i] / (2*eb_abs))."""

    dims: Dims
    codes: np.ndarray  # flat int64

    def as_3d(self) -> np.ndarray:
        return self.codes.reshape(self.dims.shape3d)


@dataclass(frozen=True)
class QuantGrid:
    """Radius-shifted prediction deltas, one unsigned code < cap per element.

    Outlier positions hold the radius as a placeholder so that fusing the
    sparse deltas back is a pure addition.
    """

    dims: Dims
    codes: np.ndarray  # flat uint32

    def as_3d(self) -> np.ndarray:
        return self.codes.reshape(self.dims.shape3d)


@dataclass(frozen=True)
class OutlierList:
    """Sparse out-of-range deltas as (grid flat index, exact integer delta)."""

    indices: np.ndarray  # int64, strictly increasing
    deltas: np.ndarray  # int64

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.deltas):
            raise DataError("outlier index/delta arrays differ in length")
        if len(self.indices) > 1 and not (np.diff(self.indices) > 0).all():
            raise DataError("outlier indices must be strictly increasing")

    def __len__(self) -> int:
        return len(self.indices)

    @classmethod
    def empty(cls) -> "OutlierList":
        return cls(np.empty(0, np.int64), np.empty(0, np.int64))


def _round_half_away(x: np.ndarray) -> np.ndarray:
    # np.round ties to even; the quantizer needs ties away from zero.
    return np.trunc(x + np.copysign(0.5, x))


def prequantize(field: Field, cfg: QuantConfig) -> PrequantGrid:
    """Integerize samples to round(d / (2*eb_abs)), ties away from zero."""
    scaled = field.values.astype(np.float64) / (2.0 * cfg.eb_abs)
    rounded = _round_half_away(scaled)
    if (np.abs(rounded) >= _PREQUANT_LIMIT).any():
        raise QuantOverflowError(
            "prequantized magnitude exceeds the integer range; "
            "use a larger error bound"
        )
    codes = rounded.astype(np.int64)
    # Error-bound invariant, verified in debug/test runs only.
    assert (
        np.abs(field.values - codes * (2.0 * cfg.eb_abs))
        <= cfg.eb_abs * (1.0 + 1e-12)
    ).all()
    return PrequantGrid(field.dims, codes)


def lorenzo_predict(chunk: np.ndarray, x: int, y: int = 0, z: int = 0, ndim: int = 1) -> int:
    """First-order Lorenzo prediction at local chunk coords, zeros outside.

    chunk is a [z, y, x] shaped integer array holding already-known values;
    only coordinates strictly below (z, y, x) in row-major order are read.
    """

    def at(dz: int, dy: int, dx: int) -> int:
        zz, yy, xx = z - dz, y - dy, x - dx
        if zz < 0 or yy < 0 or xx < 0:
            return 0
        return int(chunk[zz, yy, xx])

    if ndim == 1:
        return at(0, 0, 1)
    if ndim == 2:
        return at(0, 1, 0) + at(0, 0, 1) - at(0, 1, 1)
    return (
        at(1, 1, 1) - at(1, 1, 0) - at(0, 1, 1) + at(0, 1, 0)
        - at(1, 0, 1) + at(1, 0, 0) + at(0, 0, 1)
    )


def _lorenzo_deltas(chunk: np.ndarray, ndim: int) -> np.ndarray:
    """Prediction deltas d - p for a whole chunk via nested first differences."""
    deltas = chunk
    for axis in range(3 - ndim, 3):  # x always; y for 2D/3D; z for 3D
        deltas = np.diff(deltas, axis=axis, prepend=0)
    return deltas


def construct_chunk(
    chunk: np.ndarray, cfg: QuantConfig, ndim: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Quantize one prequantized chunk.

    chunk: [z, y, x] shaped int64 view. Returns (codes, outlier_indices,
    outlier_deltas) where codes is uint32 flat row-major within the chunk and
    outlier indices are chunk-local flat offsets.
    """
    r = cfg.radius
    deltas = _lorenzo_deltas(chunk, ndim).reshape(-1)
    in_range = np.abs(deltas) < r
    codes = np.where(in_range, deltas + r, r).astype(np.uint32)
    out_idx = np.flatnonzero(~in_range).astype(np.int64)
    return codes, out_idx, deltas[out_idx]


def construct_grid(
    prequant: PrequantGrid, cfg: QuantConfig, spec: ChunkSpec, threads: int = 1
) -> tuple[QuantGrid, OutlierList]:
    """Quantize every chunk; merge outliers in chunk order, then sort by index.

    Chunks write disjoint regions and per-chunk outliers are merged by chunk
    ordinal, so the result is identical for any thread count.
    """
    dims = prequant.dims
    grid3d = prequant.as_3d()
    codes3d = np.empty(dims.shape3d, np.uint32)
    views = partition(dims, spec)
    idx_parts: list[np.ndarray | None] = [None] * len(views)
    delta_parts: list[np.ndarray | None] = [None] * len(views)

    def work(view) -> None:
        q, out_idx, out_delta = construct_chunk(grid3d[view.slices], cfg, dims.ndim)
        codes3d[view.slices] = q.reshape(view.extent[::-1])
        if len(out_idx):
            idx_parts[view.chunk_index] = _local_to_global(out_idx, view, dims)
            delta_parts[view.chunk_index] = out_delta

    _run_chunks(work, views, threads)
    kept_idx = [p for p in idx_parts if p is not None]
    kept_delta = [p for p in delta_parts if p is not None]
    if kept_idx:
        indices = np.concatenate(kept_idx)
        deltas = np.concatenate(kept_delta)
        order = np.argsort(indices, kind="stable")
        outliers = OutlierList(indices[order], deltas[order])
    else:
        outliers = OutlierList.empty()
    return QuantGrid(dims, codes3d.reshape(-1)), outliers


def _run_chunks(work, views, threads: int) -> None:
    """Apply ``work`` to every chunk view, optionally on a thread pool."""
    if threads <= 1 or len(views) < 2:
        for view in views:
            work(view)
        return
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(work, views))


def _local_to_global(local_flat: np.ndarray, view, dims: Dims) -> np.ndarray:
    lz, ly, lx = np.unravel_index(local_flat, view.extent[::-1])
    x0, y0, z0 = view.origin
    return (
        (lx + x0) + dims.nx * ((ly + y0) + dims.ny * (lz + z0))
    ).astype(np.int64)


def sequential_reconstruct_oracle(
    codes: np.ndarray,
    outlier_indices: np.ndarray,
    outlier_deltas: np.ndarray,
    cfg: QuantConfig,
    ndim: int,
) -> np.ndarray:
    """Reference decoder: one-by-one row-major reconstruction of one chunk.

    codes is the chunk's quant-codes shaped [z, y, x]; outlier indices are
    chunk-local flat offsets. Deliberately a plain sequential loop so the
    partial-sum path can be checked against it bitwise.
    """
    r = cfg.radius
    extent = codes.shape
    out = np.zeros(extent, np.int64)
    by_index = dict(zip((int(i) for i in outlier_indices), (int(d) for d in outlier_deltas)))
    flat_codes = codes.reshape(-1)
    pos = 0
    for z in range(extent[0]):
        for y in range(extent[1]):
            for x in range(extent[2]):
                delta = by_index.get(pos, int(flat_codes[pos]) - r)
                out[z, y, x] = lorenzo_predict(out, x, y, z, ndim) + delta
                pos += 1
    return out
