"""
Compress, decompress, verify: the basic round trip
==================================================

Build a smooth 2D field, compress it under a relative error bound,
decompress, and check that every sample landed within the bound.
"""

import numpy as np

from lzebc import Field, compress, decompress, parse_header, stats

# A 256x256 slice of overlapping waves, the classic "smooth simulation
# output" shape that predictive compressors are built for.
y, x = np.mgrid[0:256, 0:256]
data = np.sin(x / 17.0) * np.cos(y / 23.0) * 40.0 + 0.03 * x

field = Field.from_array(data)
print(f"field: {field.dims.ndim}D, {field.dims.count} samples, "
      f"range [{field.vmin:.3f}, {field.vmax:.3f}]")

# Relative bound: 1e-4 of the value range. The archive records the
# resolved absolute bound so the guarantee survives the round trip.
archive = compress(field, eb=1e-4, eb_mode="rel")
header = parse_header(archive)
print(f"archive: {len(archive)} bytes, workflow={header.workflow.name}, "
      f"eb_abs={header.eb_abs:.6g}")

restored = decompress(archive)

# Elementwise check against the resolved absolute bound.
err = np.abs(restored.values - field.values)
print(f"max abs error  : {err.max():.6g} (bound {header.eb_abs:.6g})")
assert err.max() <= header.eb_abs

# The same numbers the CLI prints after a compression.
quality = stats(field, restored, len(archive))
print(f"compression    : {quality.compression_ratio:.2f}x")
print(f"rmse           : {quality.rmse:.6g}")
print(f"psnr           : {quality.psnr:.2f} dB")

# Tighter bounds cost bytes: sweep three decades and watch the trade.
print("\n  eb (rel)    bytes      CR     max|err|")
for eb in (1e-2, 1e-3, 1e-4, 1e-5):
    arc = compress(field, eb=eb, eb_mode="rel")
    out = decompress(arc)
    worst = np.abs(out.values - field.values).max()
    ratio = field.nbytes / len(arc)
    print(f"  {eb:8.0e}  {len(arc):8d}  {ratio:6.1f}x  {worst:.3g}")
