"""
From neighbor prediction to nested prefix sums
==============================================

Decompression never predicts element-by-element. Because every delta is
"current value minus a signed combination of already-known neighbors"
with coefficients summing to one, the inverse collapses into one
inclusive prefix sum per axis. This walkthrough shows both directions on
a grid small enough to read, then checks the fast path against a slow
one-by-one decoder.
"""

import numpy as np

from lzebc import ChunkSpec, Dims, Field, QuantConfig
from lzebc.quantize import (
    construct_chunk,
    construct_grid,
    prequantize,
    sequential_reconstruct_oracle,
)
from lzebc.reconstruct import reconstruct_grid

cfg = QuantConfig(eb_abs=0.05, cap=1024)
r = cfg.radius  # code r means "delta zero"

# --- forward: integerize, then difference along each axis ----------------
data = np.array([
    [1.0, 1.1, 1.2, 1.3],
    [2.0, 2.1, 2.2, 2.3],
    [3.0, 3.1, 3.2, 3.3],
])
field = Field.from_array(data)
pre = prequantize(field, cfg)  # round(value / (2*eb))
print("prequant integers:\n", pre.as_3d()[0])

codes, out_idx, out_deltas = construct_chunk(pre.as_3d(), cfg, ndim=2)
deltas = codes.astype(np.int64).reshape(3, 4) - r
print("prediction deltas (codes - r):\n", deltas)
print("outliers:", len(out_idx))

# Row 0 carries the x-differences of the first row; column 0 carries the
# y-differences of the first column; everything interior is a second
# difference, near zero for smooth data.

# --- inverse: prefix sums, x then y ---------------------------------------
step1 = np.cumsum(deltas, axis=1)  # undo the x-difference
step2 = np.cumsum(step1, axis=0)   # undo the y-difference
print("after x prefix sum:\n", step1)
print("after y prefix sum (prequant recovered):\n", step2)
assert np.array_equal(step2, pre.as_3d()[0])

values = step2 * (2 * cfg.eb_abs)
print("dequantized:\n", values)
assert np.abs(values - data).max() <= cfg.eb_abs

# --- the same equivalence, checked bitwise at random -----------------------
# The slow decoder walks the grid row-major, predicting each element from
# its reconstructed neighbors. The fast path must match it exactly.
rng = np.random.default_rng(42)
for trial in range(200):
    chunk = rng.integers(-2000, 2000, size=(4, 6, 5)).astype(np.int64)
    codes, out_idx, out_deltas = construct_chunk(chunk, cfg, ndim=3)
    slow = sequential_reconstruct_oracle(
        codes.reshape(4, 6, 5), out_idx, out_deltas, cfg, ndim=3)
    assert np.array_equal(slow, chunk)
print("\n200 random 3D chunks: slow one-by-one decoder inverts construction")

# --- whole grids run the same machinery chunk by chunk --------------------
# A small code cap forces some deltas out of range; those become sparse
# (index, exact delta) outliers that are fused back before the prefix sums.
tight = QuantConfig(0.01, cap=256)
wide = Field.from_array(rng.normal(size=(37, 53)))
pre = prequantize(wide, tight)
spec = ChunkSpec(16, 16)
quant, outliers = construct_grid(pre, tight, spec)
restored = reconstruct_grid(quant, outliers, tight, spec)
assert np.array_equal(restored.codes, pre.codes)
print(f"37x53 grid with {len(outliers)} outliers: chunked partial-sum "
      "reconstruction is exact")
