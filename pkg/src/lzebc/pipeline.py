"""End-to-end compression pipeline and the on-disk archive format.

An archive is a fixed 130-byte little-endian header followed by up to three
8-byte-aligned sections: codebook (canonical code lengths), symbol stream
(bit-packed codes or run-length data), and outliers (raw index/delta pairs).
Archives are byte-identical for fixed inputs, regardless of thread count.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .codebook import Codebook, histogram
from .errors import CorruptArchiveError, DataError
from .grid import SCALAR_DTYPES, ChunkSpec, Dims, Field, partition
from .huffman import BitStream, decode, encode
from .quantize import OutlierList, QuantConfig, QuantGrid, construct_grid, prequantize
from .reconstruct import dequantize, reconstruct_grid
from .rle import run_length_decode, run_length_encode
from .smoothness import Workflow, select_workflow

MAGIC = b"LZEBC\x00\x00\x01"
VERSION = 1

# magic, version, dtype, ndim, dims, chunk edges, eb mode, eb value,
# vmin, vmax, cap, workflow, element count, outlier count,
# (offset, length) for codebook / symbol stream / outlier sections.
_HEADER = struct.Struct("<8sHBB3I3IBdddIBQQ6Q")
_SECTION_BASE = (_HEADER.size + 7) & ~7

_DTYPE_CODES = {"f32": 0, "f64": 1}
_DTYPE_NAMES = {0: "f32", 1: "f64"}
_EB_MODES = {"abs": 0, "rel": 1}

_OUTLIER_DT = np.dtype([("index", "<u8"), ("delta", "<i8")])

_WORKFLOW_ALIASES = {
    "auto": None,
    "huffman": Workflow.HUFFMAN,
    "huff": Workflow.HUFFMAN,
    "rle": Workflow.RLE,
    "rlevle": Workflow.RLE_VLE,
}


@dataclass(frozen=True)
class ArchiveHeader:
    """Decoded archive header: geometry, bound, codec choice, section table."""

    dtype: str
    dims: Dims
    chunk: ChunkSpec
    eb_mode: str
    eb_value: float
    vmin: float
    vmax: float
    cap: int
    workflow: Workflow
    count: int
    outlier_count: int
    codebook: tuple[int, int]  # (offset, byte length)
    symbols: tuple[int, int]
    outliers: tuple[int, int]

    @property
    def eb_abs(self) -> float:
        if self.eb_mode == "abs":
            return self.eb_value
        return self.eb_value * (self.vmax - self.vmin)


@dataclass(frozen=True)
class QualityStats:
    """Size and distortion metrics of one compression run."""

    compression_ratio: float
    max_abs_err: float
    rmse: float
    psnr: float  # dB; inf when the reconstruction is exact

    def as_line(self) -> str:
        return (
            f"cr={self.compression_ratio:.6g} max_abs_err={self.max_abs_err:.6g} "
            f"rmse={self.rmse:.6g} psnr={self.psnr:.6g}"
        )


def resolve_workflow(workflow: Workflow | str | None) -> Workflow | None:
    """Normalize a workflow argument; None or 'auto' defer to selection."""
    if workflow is None or isinstance(workflow, Workflow):
        return workflow
    try:
        return _WORKFLOW_ALIASES[workflow.lower()]
    except KeyError:
        raise DataError(f"unknown workflow {workflow!r}") from None


def gather_chunk_major(quant: QuantGrid, spec: ChunkSpec) -> np.ndarray:
    """Flatten quant-codes chunk by chunk (ordinal order, row-major inside)."""
    g = quant.as_3d()
    return np.concatenate([g[v.slices].ravel() for v in partition(quant.dims, spec)])


def scatter_chunk_major(stream: np.ndarray, dims: Dims, spec: ChunkSpec) -> QuantGrid:
    """Invert gather_chunk_major back into grid order."""
    if len(stream) != dims.count:
        raise CorruptArchiveError("symbol stream length does not match the grid")
    g = np.empty(dims.shape3d, np.uint32)
    pos = 0
    for v in partition(dims, spec):
        g[v.slices] = stream[pos : pos + v.count].reshape(v.extent[::-1])
        pos += v.count
    return QuantGrid(dims, g.reshape(-1))


def _resolve_eb(mode: str, value: float, vmin: float, vmax: float) -> float:
    if mode not in _EB_MODES:
        raise DataError(f"eb mode must be 'abs' or 'rel', got {mode!r}")
    if not (np.isfinite(value) and value > 0):
        raise DataError(f"error bound must be positive and finite, got {value}")
    if mode == "abs":
        return value
    if vmax <= vmin:
        raise DataError(
            "relative error bound needs a nonzero value range; "
            "use an absolute bound for constant fields"
        )
    return value * (vmax - vmin)


def compress(
    field: Field,
    eb: float,
    eb_mode: str = "rel",
    cap: int = 1024,
    workflow: Workflow | str | None = None,
    chunk: ChunkSpec | None = None,
    select_mode: str = "exact",
    threads: int = 1,
) -> bytes:
    """Compress a field into archive bytes.

    With ``workflow`` unset (or 'auto'), the codec path is selected from the
    quant-code histogram. The output is deterministic for fixed inputs and
    settings.
    """
    eb_abs = _resolve_eb(eb_mode, eb, field.vmin, field.vmax)
    cfg = QuantConfig(eb_abs, cap)
    chunk = chunk or ChunkSpec.default_for(field.dims.ndim)
    prequant = prequantize(field, cfg)
    quant, outliers = construct_grid(prequant, cfg, chunk, threads=threads)
    stream = gather_chunk_major(quant, chunk)

    chosen = resolve_workflow(workflow)
    if chosen is None:
        chosen = select_workflow(histogram(stream, cap), mode=select_mode).chosen

    if chosen is Workflow.HUFFMAN:
        book = Codebook.from_counts(histogram(stream, cap))
        cb_bytes = book.serialize_lengths()
        sym_bytes = encode(stream, book).to_bytes()
    else:
        values, lengths = run_length_encode(stream)
        if chosen is Workflow.RLE:
            cb_bytes = b""
            sym_bytes = (
                struct.pack("<Q", len(values))
                + values.astype("<u4").tobytes()
                + lengths.astype("<u4").tobytes()
            )
        else:
            book = Codebook.from_counts(histogram(values, cap))
            cb_bytes = book.serialize_lengths()
            sym_bytes = (
                struct.pack("<Q", len(values))
                + encode(values, book).to_bytes()
                + lengths.astype("<u4").tobytes()
            )

    out_rec = np.empty(len(outliers), _OUTLIER_DT)
    out_rec["index"] = outliers.indices
    out_rec["delta"] = outliers.deltas
    out_bytes = out_rec.tobytes()

    sections = [cb_bytes, sym_bytes, out_bytes]
    offsets = []
    pos = _SECTION_BASE
    for sec in sections:
        offsets.append(pos)
        pos += len(sec)
        pos = (pos + 7) & ~7

    dims = field.dims
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        _DTYPE_CODES["f32" if field.values.dtype == np.float32 else "f64"],
        dims.ndim,
        dims.nx, dims.ny, dims.nz,
        chunk.cx, chunk.cy, chunk.cz,
        _EB_MODES[eb_mode],
        eb,
        field.vmin,
        field.vmax,
        cap,
        int(chosen),
        dims.count,
        len(outliers),
        offsets[0], len(cb_bytes),
        offsets[1], len(sym_bytes),
        offsets[2], len(out_bytes),
    )
    blob = bytearray(offsets[-1] + len(out_bytes))
    blob[: len(header)] = header
    for off, sec in zip(offsets, sections):
        blob[off : off + len(sec)] = sec
    return bytes(blob)


def parse_header(raw: bytes) -> ArchiveHeader:
    """Validate and decode an archive header and its section table."""
    if len(raw) < _HEADER.size:
        raise CorruptArchiveError("archive shorter than its header")
    (
        magic, version, dtype_code, ndim,
        nx, ny, nz, cx, cy, cz,
        eb_code, eb_value, vmin, vmax, cap, wf_code,
        count, outlier_count,
        cb_off, cb_len, sym_off, sym_len, out_off, out_len,
    ) = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CorruptArchiveError("bad magic")
    if version != VERSION:
        raise CorruptArchiveError(f"unsupported version {version}")
    if dtype_code not in _DTYPE_NAMES:
        raise CorruptArchiveError(f"unknown dtype code {dtype_code}")
    try:
        workflow = Workflow(wf_code)
        dims = Dims(nx, ny, nz, ndim=ndim)
        chunk = ChunkSpec(cx, cy, cz)
    except (ValueError, DataError) as exc:
        raise CorruptArchiveError(f"invalid header field: {exc}") from exc
    if count != dims.count:
        raise CorruptArchiveError("element count disagrees with dims")
    if cap < 4 or cap & (cap - 1):
        raise CorruptArchiveError(f"invalid cap {cap}")
    eb_mode = "abs" if eb_code == 0 else "rel" if eb_code == 1 else None
    if eb_mode is None:
        raise CorruptArchiveError(f"unknown eb mode {eb_code}")
    if not (np.isfinite(eb_value) and eb_value > 0):
        raise CorruptArchiveError("invalid error bound")
    if eb_mode == "rel" and not vmax > vmin:
        raise CorruptArchiveError("relative bound with degenerate value range")
    prev_end = _SECTION_BASE
    for off, length in ((cb_off, cb_len), (sym_off, sym_len), (out_off, out_len)):
        if off % 8 or off < prev_end or off + length > len(raw):
            raise CorruptArchiveError("section table out of bounds or overlapping")
        prev_end = off + length
    expected_cb = 0 if workflow is Workflow.RLE else cap
    if cb_len != expected_cb:
        raise CorruptArchiveError("codebook section size mismatch")
    if out_len != outlier_count * _OUTLIER_DT.itemsize:
        raise CorruptArchiveError("outlier section size mismatch")
    return ArchiveHeader(
        _DTYPE_NAMES[dtype_code], dims, chunk, eb_mode, eb_value, vmin, vmax,
        cap, workflow, count, outlier_count,
        (cb_off, cb_len), (sym_off, sym_len), (out_off, out_len),
    )


def _decode_symbols(raw: bytes, hdr: ArchiveHeader) -> np.ndarray:
    off, length = hdr.symbols
    sec = raw[off : off + length]
    if hdr.workflow is Workflow.HUFFMAN:
        book = Codebook.from_lengths(raw[hdr.codebook[0] : sum(hdr.codebook)])
        stream = decode(BitStream.from_bytes(sec), book)
    else:
        if len(sec) < 8:
            raise CorruptArchiveError("run section shorter than its count")
        (run_count,) = struct.unpack_from("<Q", sec)
        if hdr.workflow is Workflow.RLE:
            if len(sec) != 8 + 8 * run_count:
                raise CorruptArchiveError("run section size mismatch")
            values = np.frombuffer(sec, "<u4", run_count, offset=8).copy()
            lengths = np.frombuffer(sec, "<u4", run_count, offset=8 + 4 * run_count).copy()
        else:
            sub = BitStream.from_bytes(sec[8:])
            sub_size = 16 + (sub.bit_len + 7) // 8
            if sub.count != run_count or len(sec) != 8 + sub_size + 4 * run_count:
                raise CorruptArchiveError("run section size mismatch")
            book = Codebook.from_lengths(raw[hdr.codebook[0] : sum(hdr.codebook)])
            values = decode(sub, book)
            lengths = np.frombuffer(sec, "<u4", run_count, offset=8 + sub_size).copy()
        stream = run_length_decode(values, lengths)
    if len(stream) != hdr.count:
        raise CorruptArchiveError("decoded stream length does not match the grid")
    if len(stream) and int(stream.max()) >= hdr.cap:
        raise CorruptArchiveError("decoded symbol out of range")
    return stream


def _decode_outliers(raw: bytes, hdr: ArchiveHeader) -> OutlierList:
    off, length = hdr.outliers
    rec = np.frombuffer(raw, _OUTLIER_DT, hdr.outlier_count, offset=off)
    indices = rec["index"].astype(np.int64)
    if len(indices) and int(indices.max()) >= hdr.count:
        raise CorruptArchiveError("outlier index out of range")
    try:
        return OutlierList(indices, rec["delta"].astype(np.int64))
    except DataError as exc:
        raise CorruptArchiveError(f"invalid outlier list: {exc}") from exc


def decompress(raw: bytes, threads: int = 1) -> Field:
    """Decode an archive back into a field (within the recorded error bound)."""
    hdr = parse_header(raw)
    stream = _decode_symbols(raw, hdr)
    quant = scatter_chunk_major(stream, hdr.dims, hdr.chunk)
    outliers = _decode_outliers(raw, hdr)
    cfg = QuantConfig(hdr.eb_abs, hdr.cap)
    prequant = reconstruct_grid(quant, outliers, cfg, hdr.chunk, threads=threads)
    return dequantize(prequant, cfg, hdr.dtype)


def stats(original: Field, reconstructed: Field, archive_bytes: int) -> QualityStats:
    """Distortion and size metrics; PSNR is measured against the original range."""
    if original.dims != reconstructed.dims:
        raise DataError("fields have different dims")
    if archive_bytes <= 0:
        raise DataError("archive size must be positive")
    diff = original.values.astype(np.float64) - reconstructed.values.astype(np.float64)
    max_err = float(np.abs(diff).max())
    rmse = float(math.sqrt(np.mean(diff * diff)))
    rng = original.value_range
    if rmse == 0.0:
        psnr = math.inf
    elif rng == 0.0:
        psnr = -math.inf
    else:
        psnr = 20.0 * math.log10(rng / rmse)
    return QualityStats(original.nbytes / archive_bytes, max_err, rmse, psnr)
