"""
Benchmark harness for real dataset files
========================================

Point this at any raw little-endian float32/float64 grid (for example the
climate-simulation fields distributed with public compression benchmarks)
and it reports compression ratio and distortion for each workflow at a
given bound. Purely informative: ratios depend on the archive format, so
numbers published for other containers are comparable only approximately.

usage: python demos/dataset_harness.py FILE nx,ny,nz [f32|f64] [rel_eb]
"""

import sys
import time
from pathlib import Path

import numpy as np

from lzebc import compress, decompress, ingest, parse_header, stats

if len(sys.argv) < 3:
    print(__doc__)
    sys.exit(1)

path = Path(sys.argv[1])
dims = tuple(int(v) for v in sys.argv[2].split(","))
dtype = sys.argv[3] if len(sys.argv) > 3 else "f32"
rel_eb = float(sys.argv[4]) if len(sys.argv) > 4 else 1e-2

field = ingest(path.read_bytes(), dims, dtype)
print(f"{path.name}: {field.dims.ndim}D {dims}, {field.nbytes / 1e6:.1f} MB, "
      f"range [{field.vmin:.4g}, {field.vmax:.4g}], rel eb {rel_eb:g}")

print(f"\n{'workflow':13s} {'bytes':>10s} {'CR':>7s} {'max|err|':>10s} "
      f"{'psnr':>7s} {'comp s':>7s} {'decomp s':>8s}")
for wf in ("auto", "huffman", "rle", "rlevle"):
    t0 = time.perf_counter()
    archive = compress(field, eb=rel_eb, eb_mode="rel",
                       workflow=None if wf == "auto" else wf)
    t1 = time.perf_counter()
    restored = decompress(archive)
    t2 = time.perf_counter()
    q = stats(field, restored, len(archive))
    chosen = parse_header(archive).workflow.name
    label = f"{wf}" if wf != "auto" else f"auto:{chosen}"
    print(f"{label:13s} {len(archive):10d} {q.compression_ratio:6.2f}x "
          f"{q.max_abs_err:10.3g} {q.psnr:7.2f} {t1 - t0:7.2f} {t2 - t1:8.2f}")

# Returning decoded values in the input's own precision costs up to half
# an ulp at the largest magnitude, on top of the quantization bound.
eb_abs = rel_eb * field.value_range
slack = 0.0
if dtype == "f32":
    slack = float(np.spacing(np.float32(max(abs(field.vmin), abs(field.vmax))))) / 2
assert np.abs(restored.values - field.values).max() <= eb_abs + slack
print(f"\nall workflows honored the bound ({eb_abs:.4g})")
