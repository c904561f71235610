import struct

import numpy as np
import pytest

from helpers import make_field
from lzebc import (
    ChunkSpec,
    CorruptArchiveError,
    DataError,
    Field,
    QuantConfig,
    Workflow,
    compress,
    decompress,
    parse_header,
    stats,
)
from lzebc.pipeline import (
    _HEADER,
    MAGIC,
    _decode_symbols,
    gather_chunk_major,
    scatter_chunk_major,
)
from lzebc.quantize import construct_grid, prequantize


@pytest.fixture(scope="module")
def wavy_field():
    x = np.linspace(0, 9, 96 * 80).reshape(80, 96)
    return Field.from_array(np.sin(x * 3) * 40 + x)


class TestHeader:
    def test_records_settings(self, wavy_field):
        blob = compress(wavy_field, 1e-3, cap=256, chunk=ChunkSpec(8, 8),
                        workflow="huff")
        hdr = parse_header(blob)
        assert hdr.dims == wavy_field.dims
        assert hdr.dtype == "f64"
        assert (hdr.chunk.cx, hdr.chunk.cy, hdr.chunk.cz) == (8, 8, 1)
        assert hdr.cap == 256
        assert hdr.workflow is Workflow.HUFFMAN
        assert hdr.eb_mode == "rel"
        assert hdr.eb_value == 1e-3
        assert hdr.count == wavy_field.dims.count
        assert hdr.eb_abs == pytest.approx(1e-3 * wavy_field.value_range)

    def test_abs_mode(self, wavy_field):
        hdr = parse_header(compress(wavy_field, 0.125, eb_mode="abs"))
        assert hdr.eb_mode == "abs"
        assert hdr.eb_abs == 0.125

    def test_sections_are_aligned_and_ordered(self, wavy_field):
        for wf in ("huff", "rle", "rlevle"):
            hdr = parse_header(compress(wavy_field, 1e-3, workflow=wf))
            prev_end = _HEADER.size
            for off, length in (hdr.codebook, hdr.symbols, hdr.outliers):
                assert off % 8 == 0
                assert off >= prev_end
                prev_end = off + length

    def test_codebook_presence_follows_workflow(self, wavy_field):
        assert parse_header(compress(wavy_field, 1e-3, workflow="huff")).codebook[1] == 1024
        assert parse_header(compress(wavy_field, 1e-3, workflow="rle")).codebook[1] == 0
        assert parse_header(compress(wavy_field, 1e-3, workflow="rlevle")).codebook[1] == 1024


class TestRoundTrip:
    @pytest.mark.parametrize("wf", ["huff", "rle", "rlevle", None])
    @pytest.mark.parametrize("ndim", [1, 2, 3])
    def test_error_bound_holds_f64(self, ndim, wf):
        wf_salt = ["huff", "rle", "rlevle", None].index(wf)
        rng = np.random.default_rng(ndim * 31 + wf_salt)
        f = make_field(rng, ndim)
        blob = compress(f, 1e-3, workflow=wf)
        g = decompress(blob)
        eb_abs = parse_header(blob).eb_abs
        assert np.abs(f.values - g.values).max() <= eb_abs * (1 + 1e-12)

    def test_f32_within_bound_plus_cast_rounding(self):
        rng = np.random.default_rng(55)
        f = make_field(rng, 3, dtype=np.float32)
        blob = compress(f, 1e-4)
        g = decompress(blob)
        eb_abs = parse_header(blob).eb_abs
        # the final float32 cast may add up to half an ulp on top of eb
        slack = float(np.spacing(np.float32(max(abs(f.vmin), abs(f.vmax)))) / 2)
        err = np.abs(f.values.astype(np.float64) - g.values.astype(np.float64)).max()
        assert err <= eb_abs * (1 + 1e-12) + slack

    def test_decoded_dtype_matches_original(self, wavy_field):
        assert decompress(compress(wavy_field, 1e-3)).values.dtype == np.float64
        f32 = Field.from_array(wavy_field.as_3d().astype(np.float32))
        assert decompress(compress(f32, 1e-3)).values.dtype == np.float32

    def test_symbol_stream_survives_each_codec(self, wavy_field):
        cfg = QuantConfig(0.05, 1024)
        chunk = ChunkSpec.default_for(2)
        quant, _ = construct_grid(prequantize(wavy_field, cfg), cfg, chunk)
        want = gather_chunk_major(quant, chunk)
        for wf in ("huff", "rle", "rlevle"):
            blob = compress(wavy_field, 0.05, eb_mode="abs", workflow=wf)
            got = _decode_symbols(blob, parse_header(blob))
            assert np.array_equal(got, want)

    def test_workflows_decode_bitwise_identically(self):
        rng = np.random.default_rng(60)
        f = make_field(rng, 2)
        outs = [decompress(compress(f, 1e-3, workflow=wf)).values
                for wf in ("huff", "rle", "rlevle")]
        assert np.array_equal(outs[0], outs[1])
        assert np.array_equal(outs[0], outs[2])

    @pytest.mark.parametrize("count", [1, 2, 3])
    def test_tiny_grids(self, count):
        f = Field.from_array(np.linspace(5, 6, count))
        blob = compress(f, 0.01, eb_mode="abs")
        g = decompress(blob)
        assert np.abs(f.values - g.values).max() <= 0.01 * (1 + 1e-12)

    def test_outlier_heavy_field(self):
        rng = np.random.default_rng(61)
        f = Field.from_array(rng.normal(scale=1e6, size=2048))
        blob = compress(f, 1e-7, eb_mode="rel")
        hdr = parse_header(blob)
        assert hdr.outlier_count > 0
        g = decompress(blob)
        assert np.abs(f.values - g.values).max() <= hdr.eb_abs * (1 + 1e-12)


class TestDeterminism:
    def test_repeat_runs_are_byte_identical(self, wavy_field):
        a = compress(wavy_field, 1e-4)
        b = compress(wavy_field, 1e-4)
        assert a == b

    def test_thread_counts_are_byte_identical(self, wavy_field):
        import os

        blobs = {t: compress(wavy_field, 1e-4, threads=t)
                 for t in (1, 4, os.cpu_count() or 8)}
        ref = next(iter(blobs.values()))
        assert all(b == ref for b in blobs.values())


class TestValidation:
    def test_rel_eb_on_constant_field_instructs_abs(self):
        f = Field.from_array(np.full(100, 7.0))
        with pytest.raises(DataError, match="absolute"):
            compress(f, 1e-3)
        # abs mode works fine on the same field
        assert decompress(compress(f, 0.5, eb_mode="abs")).values[0] == 7.0

    def test_bad_eb_values(self, wavy_field):
        for bad in (0.0, -1.0, float("nan")):
            with pytest.raises(DataError):
                compress(wavy_field, bad)

    def test_unknown_workflow_name(self, wavy_field):
        with pytest.raises(DataError):
            compress(wavy_field, 1e-3, workflow="zip")

    def test_truncation_always_raises_corrupt(self, wavy_field):
        blob = compress(wavy_field, 1e-2, workflow="rlevle")
        hdr = parse_header(blob)
        cuts = [0, 10, _HEADER.size - 1, hdr.codebook[0] + 5,
                hdr.symbols[0] + 3, len(blob) - 1]
        for cut in cuts:
            with pytest.raises(CorruptArchiveError):
                decompress(blob[:cut])

    def test_bad_magic(self, wavy_field):
        blob = bytearray(compress(wavy_field, 1e-2))
        blob[0] ^= 0xFF
        with pytest.raises(CorruptArchiveError, match="magic"):
            decompress(bytes(blob))

    def test_bad_version(self, wavy_field):
        blob = bytearray(compress(wavy_field, 1e-2))
        struct.pack_into("<H", blob, 8, 99)
        with pytest.raises(CorruptArchiveError, match="version"):
            decompress(bytes(blob))

    def test_tampered_section_table(self, wavy_field):
        blob = bytearray(compress(wavy_field, 1e-2))
        # overlap the symbol section with the codebook section
        cb_off_pos = _HEADER.size - 48
        cb_off, cb_len = struct.unpack_from("<QQ", blob, cb_off_pos)
        struct.pack_into("<QQ", blob, cb_off_pos + 16, cb_off, cb_len + 8)
        with pytest.raises(CorruptArchiveError):
            decompress(bytes(blob))

    def test_tampered_symbol_count(self, wavy_field):
        blob = bytearray(compress(wavy_field, 1e-2, workflow="huff"))
        hdr = parse_header(bytes(blob))
        # lie about the bit stream's symbol count
        struct.pack_into("<Q", blob, hdr.symbols[0] + 8, hdr.count + 1)
        with pytest.raises(CorruptArchiveError):
            decompress(bytes(blob))

    def test_garbage_input(self):
        with pytest.raises(CorruptArchiveError):
            decompress(b"not an archive at all")


class TestScatterGather:
    def test_inverse_on_uneven_chunks(self):
        rng = np.random.default_rng(62)
        from lzebc import Dims, QuantGrid

        dims = Dims.of(13, 9, 5)
        spec = ChunkSpec(4, 4, 2)
        quant = QuantGrid(dims, rng.integers(0, 100, dims.count).astype(np.uint32))
        stream = gather_chunk_major(quant, spec)
        assert np.array_equal(scatter_chunk_major(stream, dims, spec).codes,
                              quant.codes)

    def test_stream_is_chunk_ordered(self):
        from lzebc import Dims, QuantGrid

        dims = Dims.of(4, 2)
        quant = QuantGrid(dims, np.arange(8, dtype=np.uint32))
        stream = gather_chunk_major(quant, ChunkSpec(2, 2))
        # chunks: [0,1,4,5] then [2,3,6,7]
        assert stream.tolist() == [0, 1, 4, 5, 2, 3, 6, 7]

    def test_length_mismatch_rejected(self):
        from lzebc import Dims

        with pytest.raises(CorruptArchiveError):
            scatter_chunk_major(np.zeros(7, np.uint32), Dims.of(8), ChunkSpec(4))


class TestStats:
    def test_identical_fields(self, wavy_field):
        q = stats(wavy_field, wavy_field, 1000)
        assert q.max_abs_err == 0.0
        assert q.rmse == 0.0
        assert q.psnr == float("inf")

    def test_compression_ratio_from_sizes(self):
        f = Field.from_array(np.zeros(2**20, np.float32))  # 4 MiB
        q = stats(f, f, 2**19)  # 0.5 MiB archive
        assert q.compression_ratio == 8.0

    def test_psnr_uses_original_range(self):
        a = Field.from_array(np.array([0.0, 10.0]))
        b = Field.from_array(np.array([1.0, 9.0]))
        q = stats(a, b, 1)
        assert q.max_abs_err == 1.0
        assert q.rmse == 1.0
        assert q.psnr == pytest.approx(20.0)  # 20*log10(10/1)

    def test_dims_mismatch(self, wavy_field):
        with pytest.raises(DataError):
            stats(wavy_field, Field.from_array(np.zeros(4)), 10)

    def test_line_format(self, wavy_field):
        line = stats(wavy_field, wavy_field, 1234).as_line()
        assert "psnr=inf" in line
        assert line.startswith("cr=")
        assert " max_abs_err=" in line and " rmse=" in line
