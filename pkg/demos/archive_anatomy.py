"""
What's inside an archive
========================

An archive is a fixed little-endian header plus up to three 8-byte-aligned
sections: the codebook (canonical code lengths only), the symbol stream,
and the sparse outlier table. Everything a decoder needs is in the header,
so a file plus nothing else round-trips. This script dissects one archive
and then tampers with it to show the validation layer working.
"""

import numpy as np

from lzebc import CorruptArchiveError, Field, compress, decompress, parse_header

rng = np.random.default_rng(3)
ramp = np.cumsum(rng.normal(size=(64, 80)), axis=1)  # random walk rows
field = Field.from_array(ramp)
archive = compress(field, eb=1e-3, eb_mode="rel")

h = parse_header(archive)
print(f"total bytes     : {len(archive)}")
print(f"scalar type     : {h.dtype}")
print(f"grid            : {h.dims.nx} x {h.dims.ny} x {h.dims.nz} "
      f"({h.dims.ndim}D, {h.count} samples)")
print(f"chunk edges     : {h.chunk.cx} x {h.chunk.cy} x {h.chunk.cz}")
print(f"error bound     : {h.eb_value:g} ({h.eb_mode}) -> abs {h.eb_abs:.6g}")
print(f"value range     : [{h.vmin:.4f}, {h.vmax:.4f}]")
print(f"code dictionary : {h.cap} symbols")
print(f"workflow        : {h.workflow.name}")
print(f"outliers        : {h.outlier_count}")

print("\nsection table (offset, length):")
for name, (off, length) in (("codebook", h.codebook),
                            ("symbols", h.symbols),
                            ("outliers", h.outliers)):
    share = 100.0 * length / len(archive)
    print(f"  {name:9s} @ {off:6d}  {length:7d} bytes  ({share:4.1f}%)")

# The codebook section is just one byte per symbol: canonical code lengths.
# Codes are rebuilt from lengths on load, so no code table is stored.
lengths = np.frombuffer(archive, np.uint8, h.codebook[1], h.codebook[0])
used = lengths[lengths > 0]
print(f"\ncodebook: {len(used)} used symbols, "
      f"code lengths {used.min()}..{used.max()} bits")

# Every parse re-validates geometry, section bounds, and declared stream
# lengths. There is deliberately no checksum, so validation is structural:
# it catches truncation, bad geometry, and count mismatches, not arbitrary
# payload bit flips. Corrupt the symbol stream's declared count field:
broken = bytearray(archive)
broken[h.symbols[0] + 8] ^= 0xFF
try:
    decompress(bytes(broken))
    print("tampered archive decoded (unexpected)")
except CorruptArchiveError as exc:
    print(f"\ntampered symbol count rejected: {exc}")

# Truncation is caught the same way.
try:
    decompress(archive[: len(archive) // 2])
except CorruptArchiveError as exc:
    print(f"truncated archive rejected: {exc}")

# An honest archive still round-trips, of course.
restored = decompress(archive)
worst = np.abs(restored.values - field.values).max()
print(f"\nintact archive: max abs error {worst:.6g} <= {h.eb_abs:.6g}")
