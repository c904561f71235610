import numpy as np
import pytest

from lzebc import ChunkSpec, DataError, Dims, Field, ingest
from lzebc.grid import DEFAULT_CHUNK_EDGES, linear_index, partition


class TestDims:
    def test_of_arity_sets_ndim(self):
        assert Dims.of(7) == Dims(7, ndim=1)
        assert Dims.of(7, 5) == Dims(7, 5, ndim=2)
        assert Dims.of(7, 5, 3) == Dims(7, 5, 3, ndim=3)

    def test_count_and_shape(self):
        d = Dims.of(4, 3, 2)
        assert d.count == 24
        assert d.shape3d == (2, 3, 4)

    def test_trailing_axes_must_collapse(self):
        with pytest.raises(DataError):
            Dims(4, 2, 1, ndim=1)
        with pytest.raises(DataError):
            Dims(4, 2, 2, ndim=2)
        Dims(4, 1, 1, ndim=2)  # a single-row 2D grid is legal

    @pytest.mark.parametrize("bad", [0, -1, 0x1_0000_0000])
    def test_extent_bounds(self, bad):
        with pytest.raises(DataError):
            Dims(bad)

    def test_ndim_range(self):
        with pytest.raises(DataError):
            Dims(4, ndim=4)


def test_linear_index_is_a_bijection():
    d = Dims.of(5, 4, 3)
    seen = sorted(
        linear_index(d, x, y, z)
        for z in range(3) for y in range(4) for x in range(5)
    )
    assert seen == list(range(60))


def test_linear_index_rejects_out_of_range():
    with pytest.raises(IndexError):
        linear_index(Dims.of(5), 5)
    with pytest.raises(IndexError):
        linear_index(Dims.of(5, 4), 0, -1)


def test_linear_index_x_fastest():
    d = Dims.of(10, 10, 10)
    assert linear_index(d, 1, 0, 0) == 1
    assert linear_index(d, 0, 1, 0) == 10
    assert linear_index(d, 0, 0, 1) == 100


class TestPartition:
    def test_covers_every_element_once(self):
        dims = Dims.of(13, 7, 5)
        hits = np.zeros(dims.shape3d, int)
        for view in partition(dims, ChunkSpec(4, 3, 2)):
            hits[view.slices] += 1
        assert (hits == 1).all()

    def test_ordinals_are_sequential(self):
        views = partition(Dims.of(13, 7), ChunkSpec(4, 3))
        assert [v.chunk_index for v in views] == list(range(len(views)))

    def test_boundary_chunks_are_clipped(self):
        views = partition(Dims.of(10), ChunkSpec(4))
        assert [v.extent for v in views] == [(4, 1, 1), (4, 1, 1), (2, 1, 1)]

    def test_single_chunk_when_spec_covers_grid(self):
        views = partition(Dims.of(8, 8), ChunkSpec(16, 16))
        assert len(views) == 1
        assert views[0].extent == (8, 8, 1)

    def test_default_specs_match_table(self):
        for ndim, edges in DEFAULT_CHUNK_EDGES.items():
            spec = ChunkSpec.default_for(ndim)
            assert (spec.cx, spec.cy, spec.cz) == edges

    def test_chunk_edges_must_be_positive(self):
        with pytest.raises(DataError):
            ChunkSpec(0)


class TestField:
    def test_from_array_infers_dims(self):
        f = Field.from_array(np.zeros((3, 4), np.float64))
        assert f.dims == Dims(4, 3, ndim=2)

    def test_from_array_checks_declared_ndim(self):
        with pytest.raises(DataError):
            Field.from_array(np.zeros(5, np.float32), ndim=2)

    def test_rejects_non_float(self):
        with pytest.raises(DataError):
            Field.from_array(np.zeros(5, np.int32))

    @pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
    def test_rejects_non_finite_with_offset(self, bad):
        data = np.zeros(10)
        data[7] = bad
        with pytest.raises(DataError, match="offset 7"):
            Field.from_array(data)

    def test_range_tracks_min_max(self):
        f = Field.from_array(np.array([3.0, -1.0, 2.0]))
        assert (f.vmin, f.vmax) == (-1.0, 3.0)
        assert f.value_range == 4.0

    def test_flat_layout_is_x_fastest(self):
        arr = np.arange(24, dtype=np.float64).reshape(2, 3, 4)  # [z, y, x]
        f = Field.from_array(arr)
        assert f.values[linear_index(f.dims, x=1, y=2, z=1)] == arr[1, 2, 1]


class TestIngest:
    def test_roundtrip(self):
        vals = np.arange(12, dtype=np.float32)
        f = ingest(vals.tobytes(), Dims.of(4, 3), "f32")
        assert np.array_equal(f.values, vals)
        assert f.values.flags.writeable

    def test_f64(self):
        vals = np.linspace(-1, 1, 6)
        f = ingest(vals.astype("<f8").tobytes(), Dims.of(6), "f64")
        assert np.array_equal(f.values, vals)

    def test_length_mismatch_names_both_sizes(self):
        with pytest.raises(DataError, match="needs 40 bytes, got 44"):
            ingest(b"\0" * 44, Dims.of(10), "f32")

    def test_rejects_nan_payload(self):
        raw = np.array([1.0, np.nan], np.float32).tobytes()
        with pytest.raises(DataError):
            ingest(raw, Dims.of(2), "f32")
