"""Grid geometry: extents, flat addressing, chunk partitioning, raw ingestion.

Layout is row-major with x fastest everywhere: a flat offset is
``x + nx*(y + ny*z)`` and 3D views are indexed ``[z, y, x]``. Every other
module relies on this single convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

#: Scalar widths accepted for field samples, keyed by the short names used
#: in archives and on the command line.
SCALAR_DTYPES = {"f32": np.dtype("<f4"), "f64": np.dtype("<f8")}

# Extents are serialized as u32 per axis.
_MAX_AXIS = 0xFFFFFFFF

#: Default chunk edges per dimensionality.
DEFAULT_CHUNK_EDGES = {1: (256, 1, 1), 2: (16, 16, 1), 3: (8, 8, 8)}


@dataclass(frozen=True)
class Dims:
    """Grid extents with an explicit dimensionality.

    Axes above ``ndim`` must be 1; a (17, 1) grid declared 2D predicts with
    the 2D formula, which degenerates to the 1D one on a single row.
    """

    nx: int
    ny: int = 1
    nz: int = 1
    ndim: int = 1

    def __post_init__(self) -> None:
        if self.ndim not in (1, 2, 3):
            raise DataError(f"ndim must be 1, 2 or 3, got {self.ndim}")
        if self.ndim == 1 and (self.ny != 1 or self.nz != 1):
            raise DataError("1D grid must have ny == nz == 1")
        if self.ndim == 2 and self.nz != 1:
            raise DataError("2D grid must have nz == 1")
        for n, name in ((self.nx, "nx"), (self.ny, "ny"), (self.nz, "nz")):
            if not 1 <= n <= _MAX_AXIS:
                raise DataError(f"{name} must be in [1, {_MAX_AXIS}], got {n}")

    @classmethod
    def of(cls, *extents: int) -> "Dims":
        """Build Dims from one to three per-axis extents, x first."""
        if not 1 <= len(extents) <= 3:
            raise DataError("expected 1 to 3 extents")
        nx, *rest = extents
        ny = rest[0] if len(rest) >= 1 else 1
        nz = rest[1] if len(rest) >= 2 else 1
        return cls(nx, ny, nz, ndim=len(extents))

    @property
    def count(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def shape3d(self) -> tuple[int, int, int]:
        """Shape for numpy views in [z, y, x] order."""
        return (self.nz, self.ny, self.nx)


def linear_index(dims: Dims, x: int, y: int = 0, z: int = 0) -> int:
    """Flat offset of coordinates (x, y, z); bijective over the grid."""
    if not (0 <= x < dims.nx and 0 <= y < dims.ny and 0 <= z < dims.nz):
        raise IndexError(f"coordinates ({x}, {y}, {z}) outside {dims}")
    return x + dims.nx * (y + dims.ny * z)


@dataclass(frozen=True)
class ChunkSpec:
    """Chunk edge lengths per axis."""

    cx: int
    cy: int = 1
    cz: int = 1

    def __post_init__(self) -> None:
        for n, name in ((self.cx, "cx"), (self.cy, "cy"), (self.cz, "cz")):
            if n < 1:
                raise DataError(f"chunk edge {name} must be >= 1, got {n}")

    @classmethod
    def default_for(cls, ndim: int) -> "ChunkSpec":
        return cls(*DEFAULT_CHUNK_EDGES[ndim])


@dataclass(frozen=True)
class ChunkView:
    """One tile of the chunk grid: origin, clipped extent, and ordinal."""

    origin: tuple[int, int, int]
    extent: tuple[int, int, int]
    chunk_index: int

    @property
    def slices(self) -> tuple[slice, slice, slice]:
        """Slices selecting this chunk from a [z, y, x] shaped array."""
        (x0, y0, z0), (ex, ey, ez) = self.origin, self.extent
        return (slice(z0, z0 + ez), slice(y0, y0 + ey), slice(x0, x0 + ex))

    @property
    def count(self) -> int:
        ex, ey, ez = self.extent
        return ex * ey * ez


def partition(dims: Dims, spec: ChunkSpec) -> list[ChunkView]:
    """Tile the grid with chunks, boundary chunks clipped, row-major order.

    Chunk ordinals enumerate the chunk grid with x-chunks fastest; the tiles
    cover every element exactly once.
    """
    views = []
    index = 0
    for z0 in range(0, dims.nz, spec.cz):
        ez = min(spec.cz, dims.nz - z0)
        for y0 in range(0, dims.ny, spec.cy):
            ey = min(spec.cy, dims.ny - y0)
            for x0 in range(0, dims.nx, spec.cx):
                ex = min(spec.cx, dims.nx - x0)
                views.append(ChunkView((x0, y0, z0), (ex, ey, ez), index))
                index += 1
    return views


@dataclass(frozen=True)
class Field:
    """An N-dimensional grid of finite float samples with its observed range."""

    dims: Dims
    values: np.ndarray  # flat, row-major x-fastest, float32 or float64
    vmin: float
    vmax: float

    def as_3d(self) -> np.ndarray:
        return self.values.reshape(self.dims.shape3d)

    @property
    def nbytes(self) -> int:
        return self.values.nbytes

    @property
    def value_range(self) -> float:
        return self.vmax - self.vmin

    @classmethod
    def from_array(cls, arr: np.ndarray, ndim: int | None = None) -> "Field":
        """Wrap a 1/2/3-dimensional array, validating finiteness.

        Array axes are interpreted [z, y, x] (C order, x fastest), matching
        the flat layout; ``ndim`` defaults to the array's dimensionality.
        """
        arr = np.asarray(arr)
        if arr.dtype not in (np.float32, np.float64):
            raise DataError(f"field values must be float32 or float64, got {arr.dtype}")
        if not 1 <= arr.ndim <= 3:
            raise DataError(f"expected a 1D/2D/3D array, got {arr.ndim}D")
        extents = arr.shape[::-1]  # (nx,), (nx, ny) or (nx, ny, nz)
        dims = Dims.of(*extents)
        if ndim is not None and ndim != dims.ndim:
            raise DataError(f"array is {dims.ndim}D but ndim={ndim} was declared")
        flat = np.ascontiguousarray(arr).reshape(-1)
        _check_finite(flat)
        return cls(dims, flat, float(flat.min()), float(flat.max()))


def _check_finite(flat: np.ndarray) -> None:
    bad = ~np.isfinite(flat)
    if bad.any():
        offset = int(np.argmax(bad))
        raise DataError(f"non-finite value at element offset {offset}")


def ingest(
    raw: bytes, dims: "Dims | tuple[int, ...]", dtype: str | np.dtype
) -> Field:
    """Build a Field from a headerless little-endian scalar stream.

    dims may be a Dims or a plain (nx[, ny[, nz]]) tuple of extents.
    """
    if not isinstance(dims, Dims):
        dims = Dims.of(*dims)
    dt = SCALAR_DTYPES[dtype] if isinstance(dtype, str) else np.dtype(dtype)
    expected = dims.count * dt.itemsize
    if len(raw) != expected:
        raise DataError(
            f"length mismatch: dims {dims.nx}x{dims.ny}x{dims.nz} with "
            f"{dt.itemsize}-byte scalars needs {expected} bytes, got {len(raw)}"
        )
    # astype() yields a native-order writable copy.
    values = np.frombuffer(raw, dtype=dt).astype(dt.base.newbyteorder("="))
    _check_finite(values)
    return Field(dims, values, float(values.min()), float(values.max()))
